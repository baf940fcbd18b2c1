#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sfl {

/// Quadratic reconstruction-score model RS(alpha) = a2*alpha^2 + a1*alpha + a0
/// over alpha in [0, 1]. RS proxies the SSIM an honest-but-curious server can
/// reach when inverting smashed data; lower is more private.
struct RsModel {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
  /// Root-mean-square residual of the fit that produced the coefficients.
  double fit_rmse = 0.0;

  bool convex() const { return a2 > 0.0; }
};

/// One empirical measurement: SSIM of the reconstruction at a given cut fraction.
struct RsSample {
  double alpha = 0.0;
  double ssim = 0.0;
};

/// Built-in default model "fmnist-ssim": coefficients fitted offline on
/// Fashion-MNIST reconstruction measurements (recorded fit RMSE 0.0028).
RsModel fmnist_ssim_model();

double rs_eval(const RsModel& model, double alpha);

/// Ordinary least-squares quadratic through the samples. Needs at least three
/// distinct alphas; near-coincident designs raise FitError. Deterministic and
/// order-independent to ~1e-12.
RsModel fit_quadratic(std::span<const RsSample> samples);

/// Vertex of a convex model, clamped to [0, 1]. Throws NonConvexModelError
/// when a2 <= 0 (callers fall back to grid search).
double rs_minimizer_alpha(const RsModel& model);

/// Model-validity warnings for use as an SSIM proxy (reported, never fatal):
/// non-convex coefficients, or evaluations escaping [0, 1] on the domain.
std::vector<std::string> rs_model_warnings(const RsModel& model);

/// Parses "alpha,ssim" lines; '#' starts a comment, one optional header line.
/// Errors carry "source:line:" diagnostics.
std::vector<RsSample> parse_rs_samples(std::istream& in, const std::string& source_name);
std::vector<RsSample> load_rs_samples(const std::string& path);

}  // namespace sfl
