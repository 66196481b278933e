#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mlopt/coarse_model.hpp"
#include "mlopt/grid_transfer.hpp"
#include "mlopt/objective.hpp"

namespace mlopt {

/// Parallel-beam projection matrix in pixel units. The image occupies
/// [-side/2, side/2]^2 with unit pixels; pixel (r, c) has its centre at
/// (c + 0.5 - side/2, side/2 - r - 0.5). Detector bins have unit spacing and
/// are centred on the rotation axis.
struct Projector {
  SparseMatrix a;
  int n_angles = 0;
  int det_count = 0;
  Grid2D grid{2};
  std::vector<double> angles;
};

/// Number of equidistant angles giving m = n_angles * side ~ undersampling * n.
int angles_for_undersampling(Grid2D grid, double undersampling);

/// Siddon ray tracing: A_ij is the length of ray i inside pixel j.
Projector build_projector(Grid2D grid, int n_angles);
Projector build_projector(Grid2D grid, double undersampling);

/// Intersection lengths of the line {p0 + t dir} with every pixel it crosses,
/// as (pixel index, length) pairs in order along the ray. `dir` must be unit.
std::vector<std::pair<Index, double>> trace_ray(Grid2D grid, double p0x, double p0y, double dirx, double diry);

/// Forward differences, x-direction block first (rows 0..n-1) then
/// y-direction. Rows at the last column/row are zero (Neumann boundary).
SparseMatrix forward_difference(Grid2D grid);

struct HuberParams {
  double lambda = 0.1;
  double rho = 0.01;
  void validate() const;
};

struct KLParams {
  double beta_dom = 1e-6;
  void validate() const;
};

/// sum_i sqrt(rho^2 + a_i^2) - rho.
double pseudo_huber(const Vector& a, double rho);
/// a_i / sqrt(rho^2 + a_i^2).
Vector pseudo_huber_derivative(const Vector& a, double rho);

/// f(y) = 1/2 ||Ay - b||^2 + lambda L_rho(Dy).
class HuberTvObjective final : public Objective {
 public:
  HuberTvObjective(SparseMatrix a, SparseMatrix d, Vector b, HuberParams params);

  [[nodiscard]] Index dim() const override { return a_.cols(); }
  [[nodiscard]] double value(const Vector& y) const override;
  [[nodiscard]] Vector gradient(const Vector& y) const override;
  [[nodiscard]] bool has_hessian_vec() const override { return true; }
  [[nodiscard]] Vector hessian_vec(const Vector& y, const Vector& v) const override;

  [[nodiscard]] const SparseMatrix& a() const { return a_; }
  [[nodiscard]] const SparseMatrix& d() const { return d_; }
  [[nodiscard]] const Vector& b() const { return b_; }
  [[nodiscard]] const HuberParams& params() const { return params_; }

 private:
  SparseMatrix a_;
  SparseMatrix at_;
  SparseMatrix d_;
  SparseMatrix dt_;
  Vector b_;
  HuberParams params_;
};

/// f(y) = <Ay, log(Ay / b)> - <Ay - b, 1>, natural log. Requires b > 0 and
/// throws DomainError when some (Ay)_i <= 0.
class KlObjective final : public Objective {
 public:
  KlObjective(SparseMatrix a, Vector b);

  [[nodiscard]] Index dim() const override { return a_.cols(); }
  [[nodiscard]] double value(const Vector& y) const override;
  [[nodiscard]] Vector gradient(const Vector& y) const override;
  [[nodiscard]] bool has_hessian_vec() const override { return true; }
  [[nodiscard]] Vector hessian_vec(const Vector& y, const Vector& v) const override;

 private:
  Vector forward(const Vector& y) const;

  SparseMatrix a_;
  SparseMatrix at_;
  Vector b_;
};

struct LipschitzEstimate {
  double norm_a = 0.0;
  double norm_at = 0.0;
  double l_psi = 0.0;
  /// omega^2 * l_psi, omega from the full-weighting pair on the same grid.
  double l_phi_bound = 0.0;
  double omega = 0.0;
  bool converged = false;
};

/// L_psi = ||A|| ||A^T|| + 8 lambda / rho. `omega` defaults to the
/// full-weighting pair built on `grid` (when it can be coarsened).
LipschitzEstimate lipschitz_estimate(const SparseMatrix& a, const HuberParams& params,
                                     std::optional<double> omega = std::nullopt);
LipschitzEstimate lipschitz_estimate(const Projector& projector, const HuberParams& params);

enum class PhantomKind { disks, bone_like };
std::string_view to_string(PhantomKind kind);
/// Throws std::invalid_argument on unknown names.
PhantomKind phantom_kind_from_string(std::string_view name);

/// Filled disk in pixel coordinates (column x, row y measured from the top
/// left corner of the image, pixel (r, c) covering [c, c+1] x [r, r+1]).
struct Disk {
  double cx;
  double cy;
  double r;
  double value;
};

/// Pixel-centre sampling of disks painted in order onto a zero background.
Vector rasterize_disks(Grid2D grid, const std::vector<Disk>& disks);

/// Deterministic piecewise-constant phantom with values in [0, 1]. Shapes are
/// placed in relative coordinates so phantoms at different sides match.
Vector make_phantom(Grid2D grid, PhantomKind kind, std::uint64_t seed);

/// 2x2 block average onto the grid with half the side.
Vector downsample(Grid2D fine, const Vector& image);

struct TomographySetup {
  int side = 64;
  int levels = 3;
  double undersampling = 0.1;
  PhantomKind phantom = PhantomKind::disks;
  std::uint64_t seed = 1;
  HuberParams huber{};
  KLParams kl{};
  /// Constant added to the phantom before forming KL data so that b > 0.
  double kl_background = 0.05;
};

/// Tomography problem on a hierarchy of grids. Each level owns its own
/// projector (same angles at side / 2^l) and data b_l = A_l phantom_l.
struct TomographyProblem {
  ObjectiveHierarchy hierarchy;
  std::vector<Projector> projectors;
  /// Ground truth at each level (level 0 = finest).
  std::vector<Vector> phantoms;
  std::optional<Box> box;
  Vector y0;
};

TomographyProblem build_huber_tv_problem(const TomographySetup& setup);
/// Box l = beta_dom, u = +inf; y0 is the constant image matching the total
/// measured mass, clamped to the box.
TomographyProblem build_kl_problem(const TomographySetup& setup);

}  // namespace mlopt
