#include "sfl/privacy.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>

#include "sfl/errors.hpp"
#include "sfl/numfmt.hpp"

namespace sfl {

namespace {

constexpr double kDistinctAlphaTol = 1e-12;
constexpr double kPivotTol = 1e-12;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must be in [0, 1], got " + std::to_string(alpha));
  }
}

double eval_raw(const RsModel& m, double alpha) {
  return (m.a2 * alpha + m.a1) * alpha + m.a0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

int distinct_alpha_count(std::span<const RsSample> samples) {
  std::vector<double> alphas;
  alphas.reserve(samples.size());
  for (const RsSample& s : samples) alphas.push_back(s.alpha);
  std::sort(alphas.begin(), alphas.end());
  int distinct = alphas.empty() ? 0 : 1;
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (alphas[i] - alphas[i - 1] > kDistinctAlphaTol) ++distinct;
  }
  return distinct;
}

// Solves the 3x3 normal system with partial pivoting. Pivots that collapse
// relative to the largest matrix entry signal a (numerically) degenerate
// design even when the alphas pass the distinctness count.
std::array<double, 3> solve_normal_equations(std::array<std::array<double, 3>, 3> m,
                                             std::array<double, 3> rhs) {
  double max_entry = 0.0;
  for (const auto& row : m) {
    for (double v : row) max_entry = std::max(max_entry, std::abs(v));
  }
  for (int col = 0; col < 3; ++col) {
    int pivot_row = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot_row][col])) pivot_row = row;
    }
    if (std::abs(m[pivot_row][col]) <= kPivotTol * max_entry) {
      throw FitError("fit_quadratic: ill-conditioned sample design (near-coincident alphas)");
    }
    std::swap(m[col], m[pivot_row]);
    std::swap(rhs[col], rhs[pivot_row]);
    for (int row = col + 1; row < 3; ++row) {
      const double factor = m[row][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[row][k] -= factor * m[col][k];
      rhs[row] -= factor * rhs[col];
    }
  }
  std::array<double, 3> x{};
  for (int row = 2; row >= 0; --row) {
    double acc = rhs[row];
    for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * x[k];
    x[row] = acc / m[row][row];
  }
  return x;
}

}  // namespace

RsModel fmnist_ssim_model() {
  // fit_rmse is the recorded quality of the offline fit that produced these
  // coefficients, not something this library recomputes.
  return RsModel{0.3597, -0.7004, 0.7675, 0.0028};
}

double rs_eval(const RsModel& model, double alpha) {
  check_alpha(alpha);
  return eval_raw(model, alpha);
}

RsModel fit_quadratic(std::span<const RsSample> samples) {
  for (const RsSample& s : samples) {
    if (!(s.alpha >= 0.0 && s.alpha <= 1.0)) {
      throw DomainError("fit_quadratic: sample alpha out of [0, 1]: " + std::to_string(s.alpha));
    }
    if (!(s.ssim >= 0.0 && s.ssim <= 1.0)) {
      throw DomainError("fit_quadratic: sample ssim out of [0, 1]: " + std::to_string(s.ssim));
    }
  }
  const int distinct = distinct_alpha_count(samples);
  if (distinct < 3) {
    throw FitError("fit_quadratic: underdetermined, need >= 3 distinct alphas, got " +
                   std::to_string(distinct));
  }

  // Normal equations of the least-squares quadratic: moments up to alpha^4.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  double t0 = 0, t1 = 0, t2 = 0;
  for (const RsSample& s : samples) {
    const double a = s.alpha;
    const double a2 = a * a;
    s0 += 1.0;
    s1 += a;
    s2 += a2;
    s3 += a2 * a;
    s4 += a2 * a2;
    t0 += s.ssim;
    t1 += a * s.ssim;
    t2 += a2 * s.ssim;
  }
  const auto coeffs =
      solve_normal_equations({{{s4, s3, s2}, {s3, s2, s1}, {s2, s1, s0}}}, {t2, t1, t0});

  RsModel model{coeffs[0], coeffs[1], coeffs[2], 0.0};
  double sq_residual = 0.0;
  for (const RsSample& s : samples) {
    const double r = eval_raw(model, s.alpha) - s.ssim;
    sq_residual += r * r;
  }
  model.fit_rmse = std::sqrt(sq_residual / static_cast<double>(samples.size()));
  return model;
}

double rs_minimizer_alpha(const RsModel& model) {
  if (!model.convex()) {
    throw NonConvexModelError("rs_minimizer_alpha: model is not convex (a2 = " +
                              std::to_string(model.a2) + ")");
  }
  return std::clamp(-model.a1 / (2.0 * model.a2), 0.0, 1.0);
}

std::vector<std::string> rs_model_warnings(const RsModel& model) {
  std::vector<std::string> warnings;
  if (!model.convex()) {
    warnings.push_back("RS model is not convex (a2 = " + fmt_sig6(model.a2) +
                       "); the optimizer falls back to grid search");
  }
  // Extremes of a quadratic on [0, 1]: the endpoints plus an interior vertex.
  double lo = std::min(eval_raw(model, 0.0), eval_raw(model, 1.0));
  double hi = std::max(eval_raw(model, 0.0), eval_raw(model, 1.0));
  if (model.a2 != 0.0) {
    const double vertex = -model.a1 / (2.0 * model.a2);
    if (vertex > 0.0 && vertex < 1.0) {
      const double v = eval_raw(model, vertex);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo < 0.0 || hi > 1.0) {
    warnings.push_back("RS model leaves [0, 1] over its domain (range [" + fmt_sig6(lo) + ", " +
                       fmt_sig6(hi) + "]); scores are no longer a valid SSIM proxy there");
  }
  return warnings;
}

std::vector<RsSample> parse_rs_samples(std::istream& in, const std::string& source_name) {
  std::vector<RsSample> samples;
  std::string line;
  int line_no = 0;
  bool header_allowed = true;

  const auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(source_name + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string_view content = trim(line);
    if (content.empty()) continue;

    const auto comma = content.find(',');
    std::string_view first = comma == std::string_view::npos ? content : content.substr(0, comma);
    std::string_view rest =
        comma == std::string_view::npos ? std::string_view{} : content.substr(comma + 1);

    RsSample sample;
    const bool ok = comma != std::string_view::npos &&
                    rest.find(',') == std::string_view::npos &&
                    parse_double(first, sample.alpha) && parse_double(rest, sample.ssim);
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;  // one non-numeric header line is tolerated
        continue;
      }
      throw fail("expected 'alpha,ssim', got '" + std::string(content) + "'");
    }
    header_allowed = false;
    if (!(sample.alpha >= 0.0 && sample.alpha <= 1.0)) {
      throw fail("alpha out of [0, 1]: " + std::string(first));
    }
    if (!(sample.ssim >= 0.0 && sample.ssim <= 1.0)) {
      throw fail("ssim out of [0, 1]: " + std::string(trim(rest)));
    }
    samples.push_back(sample);
  }
  return samples;
}

std::vector<RsSample> load_rs_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open samples file");
  }
  return parse_rs_samples(in, path);
}

}  // namespace sfl
