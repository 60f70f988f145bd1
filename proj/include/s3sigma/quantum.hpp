#pragma once

#include "s3sigma/geometry.hpp"
#include "s3sigma/quadrature.hpp"
#include "s3sigma/specfun.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace s3sigma {

using Vec3c = Eigen::Matrix<cplx, 3, 1>;
using Vec4c = Eigen::Matrix<cplx, 4, 1>;
using Mat3c = Eigen::Matrix<cplx, 3, 3>;
using Mat4c = Eigen::Matrix<cplx, 4, 4>;

struct SpectralLabel {
  int n = 0;
  int l = 0;
  int m_z = 0;

  void validate() const;
  double energy(const SpaceConfig& cfg) const;  ///< n (n + 2) / (2 m R^2)
  bool operator==(const SpectralLabel&) const = default;
};

/// All labels with n <= n_max, ordered by (n, l, m_z).
std::vector<SpectralLabel> labels_up_to(int n_max);

/// Value, gradient and Hessian of some smooth extension to R^4 of a function
/// on the sphere. Tangential derivatives do not depend on the extension.
struct Jet4 {
  cplx value{0.0, 0.0};
  Vec4c grad = Vec4c::Zero();
  Mat4c hess = Mat4c::Zero();
};

/// Derivatives from closed-form jets, or from fourth-order central
/// differences of values in the best-conditioned orthographic chart.
enum class Backend { Analytic, FiniteDifference };

/// Hamiltonian as (m/2) sum nu_i nu_i, or as -(1/2m) times the chart
/// Laplace-Beltrami operator.
enum class HamiltonianForm { ViaNu, LaplaceBeltrami };

/// Complex function on S^3 given on embedded points x = (R rho, eps). Carries
/// closed-form derivatives up to analytic_order (0, 1 or 2).
class WaveFunction {
 public:
  using Evaluator = std::function<Jet4(const Vec4& x, int order)>;

  WaveFunction() = default;
  WaveFunction(Evaluator eval, int analytic_order, std::optional<SpectralLabel> label = std::nullopt);
  static WaveFunction from_values(std::function<cplx(const Vec4&)> f);

  cplx operator()(const Vec4& x) const;
  cplx at(const HypersphericalNode& node) const { return (*this)(node.x); }
  cplx at_chart(const ChartCoords& c, double radius) const;
  /// Closed-form jet; throws DomainError if `order` exceeds analytic_order().
  Jet4 jet(const Vec4& x, int order) const;

  int analytic_order() const { return order_; }
  const std::optional<SpectralLabel>& label() const { return label_; }
  bool valid() const { return static_cast<bool>(eval_); }

 private:
  std::shared_ptr<const Evaluator> eval_;
  int order_ = 0;
  std::optional<SpectralLabel> label_;
};

/// Derivative options shared by the operators.
struct DerivativeOptions {
  Backend backend = Backend::Analytic;
  double fd_step = 0.0;  ///< chart step; 0 selects 1e-3 R
};

/// Ambient-equivalent jet at x by the chosen backend (order 1 or 2).
Jet4 surface_jet(const WaveFunction& f, const Vec4& x, int order, const SpaceConfig& cfg,
                 const DerivativeOptions& opt);

// ---- basis ------------------------------------------------------------------

struct NormalizationInfo {
  double quadrature = 0.0;   ///< N fixed by a 1-D quadrature of the chi factor
  double closed_form = 0.0;  ///< 2^l l! sqrt(2 (n+1) (n-l)! / (nu (n+l+1)!)) with nu = pi R^3
  double nu_measured = 0.0;  ///< nu solved from the quadrature value
};
NormalizationInfo normalization(const SpectralLabel& label, const SpaceConfig& cfg);

/// N sin^l(chi) C^{(l+1)}_{n-l}(cos chi) Y_{l m_z}(theta, phi), as a polynomial
/// in the embedded coordinates (so jets are exact).
WaveFunction psi(const SpectralLabel& label, const SpaceConfig& cfg);

/// Immutable basis cache for n <= n_max.
class Basis {
 public:
  Basis(int n_max, const SpaceConfig& cfg);
  int n_max() const { return n_max_; }
  std::size_t size() const { return functions_.size(); }
  const SpectralLabel& label(std::size_t i) const { return labels_[i]; }
  const WaveFunction& function(std::size_t i) const { return functions_[i]; }
  const std::vector<WaveFunction>& functions() const { return functions_; }
  const std::vector<SpectralLabel>& labels() const { return labels_; }
  const SpaceConfig& config() const { return cfg_; }

 private:
  int n_max_;
  SpaceConfig cfg_;
  std::vector<SpectralLabel> labels_;
  std::vector<WaveFunction> functions_;
};

// ---- operators --------------------------------------------------------------

inline constexpr int kRhoAxis = 3;

/// nu_i = -(i/m) Z^{R k}_(i) d/d eps^k.
WaveFunction apply_nu(int i, const WaveFunction& f, const SpaceConfig& cfg,
                      const DerivativeOptions& opt = {});
/// Multiplication by eps_i (i < 3) or by rho - 1 (i == kRhoAxis).
WaveFunction apply_position(int i, const WaveFunction& f, const SpaceConfig& cfg);
WaveFunction apply_hamiltonian(const WaveFunction& f, const SpaceConfig& cfg,
                               HamiltonianForm form = HamiltonianForm::ViaNu,
                               const DerivativeOptions& opt = {});
/// Hermitian J_i = -i eta_i^{jk} eps_j d/d eps^k.
WaveFunction apply_J(int i, const WaveFunction& f, const SpaceConfig& cfg,
                     const DerivativeOptions& opt = {});
WaveFunction apply_J_squared(const WaveFunction& f, const SpaceConfig& cfg,
                             const DerivativeOptions& opt = {});
/// Raw generator eta_i^{jk} eps_j d/d eps^k (anti-Hermitian).
WaveFunction apply_J_raw(int i, const WaveFunction& f, const SpaceConfig& cfg,
                         const DerivativeOptions& opt = {});
/// Z^{L k}_(i) d/d eps^k and Z^{R k}_(i) d/d eps^k.
WaveFunction left_action_operator(int i, const WaveFunction& f, const SpaceConfig& cfg,
                                  const DerivativeOptions& opt = {});
WaveFunction right_action_operator(int i, const WaveFunction& f, const SpaceConfig& cfg,
                                   const DerivativeOptions& opt = {});

/// Laplace-Beltrami value at x in the best orthographic chart:
/// (delta^{km} - u^k u^m / R^2) d_k d_m f - (3 / R^2) u^m d_m f.
cplx laplace_beltrami(const WaveFunction& f, const Vec4& x, const SpaceConfig& cfg,
                      const DerivativeOptions& opt = {});

// ---- grid kernels -----------------------------------------------------------

/// values(node, function). OpenMP over nodes.
Eigen::MatrixXcd sample_on_grid(const std::vector<WaveFunction>& fs, const QuadGrid& grid);
Eigen::MatrixXcd sample_on_grid_serial(const std::vector<WaveFunction>& fs, const QuadGrid& grid);
/// G(a, b) = <A_a, B_b> = sum_nodes conj(A(node, a)) B(node, b) w(node).
Eigen::MatrixXcd gram(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const QuadGrid& grid);
Eigen::MatrixXcd gram_serial(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                             const QuadGrid& grid);
cplx inner(const WaveFunction& a, const WaveFunction& b, const QuadGrid& grid);
double norm(const WaveFunction& f, const QuadGrid& grid);

// ---- spectrum ---------------------------------------------------------------

struct SpectrumRow {
  int n = 0;
  double energy = 0.0;
  int degeneracy = 0;
};
std::vector<SpectrumRow> spectrum(int n_max, const SpaceConfig& cfg);

// ---- contraction ------------------------------------------------------------

struct ChartJet {
  cplx value{0.0, 0.0};
  Vec3c grad = Vec3c::Zero();
  Mat3c hess = Mat3c::Zero();
};

/// Function of eps with support in |eps| <= support_radius.
struct TestFunction {
  std::string name;
  double support_radius = 0.0;
  std::function<ChartJet(const Vec3&)> jet;
};

/// exp(-1 / (1 - |eps - c|^2 / r0^2)) exp(i k . eps) inside the ball, 0 outside.
/// The reported support radius is |c| + r0.
TestFunction bump_function(double r0, const Vec3& center = Vec3::Zero(),
                           const Vec3& wave = Vec3::Zero());

/// Lift of a chart function to the upper hemisphere as a WaveFunction with
/// closed-form jets (the extension ignores x0).
WaveFunction chart_wave_function(const TestFunction& tf);

struct ContractionRow {
  double radius = 0.0;
  double nu_deviation = 0.0;        ///< max |nu_i f + (i/m) d_i f|
  double hamiltonian_deviation = 0.0;  ///< max |H f + (1/2m) flat Laplacian f|
  double position_deviation = 0.0;  ///< max |eps_i f - eps_i f| for the curved operator
};

struct ContractionReport {
  double support_radius = 0.0;
  int box_points = 0;
  std::vector<ContractionRow> rows;
  double nu_slope = 0.0;
  double hamiltonian_slope = 0.0;
  bool nu_decreasing = false;
  bool hamiltonian_decreasing = false;
  double position_max = 0.0;
};

/// Deviation of curved from flat operators over a fixed box of evaluation
/// points, for each radius. Throws if a support reaches the chart boundary.
ContractionReport contraction_study(const std::vector<double>& radii,
                                    const std::vector<TestFunction>& tests, const SpaceConfig& cfg,
                                    int box_n = 7);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---- polarized wavefunctions ------------------------------------------------

/// Psi(g) = zeta exp(-i m (eps . nu + R (rho - 1) z)) f(eps) on the sigma group.
/// Returns the max deviation, over the given group points, between Z^R_a Psi
/// (by finite differences of the group coordinates) divided by the prefactor and
/// the expected reduced action: Z^R_(eps) f, -i m eps f, -i m R (rho - 1) f, i f.
double polarized_reduction_residual(const WaveFunction& f, const SpaceConfig& cfg, int points,
                                    std::uint64_t seed);

}  // namespace s3sigma
