#include "mlopt/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace mlopt {

namespace {

SparseMatrix transposed(const SparseMatrix& m) { return SparseMatrix(m.transpose()); }

struct Ellipse {
  double cx, cy, rx, ry, angle, value;
};

// Shapes in relative coordinates ([0, 1]^2, y downward) painted in order.
Vector rasterize_ellipses(Grid2D grid, const std::vector<Ellipse>& shapes) {
  Vector img = Vector::Zero(grid.size());
  const double s = grid.side;
  for (int r = 0; r < grid.side; ++r) {
    for (int c = 0; c < grid.side; ++c) {
      const double px = (c + 0.5) / s;
      const double py = (r + 0.5) / s;
      for (const auto& e : shapes) {
        const double dx = px - e.cx;
        const double dy = py - e.cy;
        const double ca = std::cos(e.angle);
        const double sa = std::sin(e.angle);
        const double u = (ca * dx + sa * dy) / e.rx;
        const double v = (-sa * dx + ca * dy) / e.ry;
        if (u * u + v * v <= 1.0) img[Index(r) * grid.side + c] = e.value;
      }
    }
  }
  return img;
}

std::vector<Grid2D> level_grids(const TomographySetup& setup) {
  if (setup.levels < 1) throw std::invalid_argument("tomography: levels must be >= 1");
  if (setup.side < 2) throw std::invalid_argument("tomography: side must be >= 2");
  std::vector<Grid2D> grids{Grid2D(setup.side)};
  for (int l = 1; l < setup.levels; ++l) grids.push_back(grids.back().coarser());
  return grids;
}

std::vector<TransferPair> level_transfers(const std::vector<Grid2D>& grids) {
  std::vector<TransferPair> pairs;
  for (std::size_t l = 0; l + 1 < grids.size(); ++l) pairs.push_back(build_full_weighting(grids[l]));
  return pairs;
}

struct LevelData {
  std::vector<Grid2D> grids;
  std::vector<Projector> projectors;
  std::vector<Vector> phantoms;
};

LevelData level_data(const TomographySetup& setup) {
  if (!(setup.undersampling > 0.0 && setup.undersampling <= 1.0)) {
    throw std::invalid_argument("tomography: undersampling must be in (0, 1]");
  }
  LevelData data;
  data.grids = level_grids(setup);
  const int n_angles = angles_for_undersampling(data.grids.front(), setup.undersampling);
  data.phantoms.push_back(make_phantom(data.grids.front(), setup.phantom, setup.seed));
  for (std::size_t l = 0; l < data.grids.size(); ++l) {
    data.projectors.push_back(build_projector(data.grids[l], n_angles));
    if (l > 0) data.phantoms.push_back(downsample(data.grids[l - 1], data.phantoms[l - 1]));
  }
  return data;
}

}  // namespace

int angles_for_undersampling(Grid2D grid, double undersampling) {
  const double m = undersampling * static_cast<double>(grid.size());
  return std::max(1, static_cast<int>(std::lround(m / grid.side)));
}

std::vector<std::pair<Index, double>> trace_ray(Grid2D grid, double p0x, double p0y, double dirx, double diry) {
  const double h = 0.5 * grid.side;
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  auto clip = [&](double p, double d) {
    if (d == 0.0) {
      if (p < -h || p > h) t_hi = -t_hi;  // parallel and outside: empty
      return;
    }
    double a = (-h - p) / d;
    double b = (h - p) / d;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  };
  clip(p0x, dirx);
  clip(p0y, diry);
  std::vector<std::pair<Index, double>> out;
  if (!(t_hi > t_lo)) return out;

  std::vector<double> ts{t_lo, t_hi};
  for (int i = 0; i <= grid.side; ++i) {
    const double line = -h + i;
    if (dirx != 0.0) ts.push_back((line - p0x) / dirx);
    if (diry != 0.0) ts.push_back((line - p0y) / diry);
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double a = std::max(ts[k], t_lo);
    const double b = std::min(ts[k + 1], t_hi);
    const double len = b - a;
    if (!(len > 1e-12)) continue;
    const double tm = 0.5 * (a + b);
    const double mx = p0x + tm * dirx;
    const double my = p0y + tm * diry;
    const int col = std::clamp(static_cast<int>(std::floor(mx + h)), 0, grid.side - 1);
    const int row = std::clamp(static_cast<int>(std::floor(h - my)), 0, grid.side - 1);
    const Index idx = Index(row) * grid.side + col;
    if (!out.empty() && out.back().first == idx) {
      out.back().second += len;
    } else {
      out.emplace_back(idx, len);
    }
  }
  return out;
}

Projector build_projector(Grid2D grid, int n_angles) {
  if (n_angles < 1) throw std::invalid_argument("build_projector: need at least one angle");
  if (grid.side < 1) throw std::invalid_argument("build_projector: empty grid");
  Projector p;
  p.grid = grid;
  p.n_angles = n_angles;
  p.det_count = grid.side;
  const Index m = Index(n_angles) * p.det_count;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m) * grid.side * 2);
  for (int a = 0; a < n_angles; ++a) {
    const double theta = std::numbers::pi * a / n_angles;
    p.angles.push_back(theta);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    for (int j = 0; j < p.det_count; ++j) {
      const double offset = j - 0.5 * (p.det_count - 1);
      const Index row = Index(a) * p.det_count + j;
      for (const auto& [idx, len] : trace_ray(grid, -offset * st, offset * ct, ct, st)) {
        triplets.emplace_back(row, idx, len);
      }
    }
  }
  p.a.resize(m, grid.size());
  p.a.setFromTriplets(triplets.begin(), triplets.end());
  p.a.makeCompressed();
  return p;
}

Projector build_projector(Grid2D grid, double undersampling) {
  if (!(undersampling > 0.0 && undersampling <= 1.0)) {
    throw std::invalid_argument("build_projector: undersampling must be in (0, 1]");
  }
  return build_projector(grid, angles_for_undersampling(grid, undersampling));
}

SparseMatrix forward_difference(Grid2D grid) {
  const Index n = grid.size();
  const int s = grid.side;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(4 * n));
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      const Index i = Index(r) * s + c;
      if (c + 1 < s) {
        t.emplace_back(i, i, -1.0);
        t.emplace_back(i, i + 1, 1.0);
      }
      if (r + 1 < s) {
        t.emplace_back(n + i, i, -1.0);
        t.emplace_back(n + i, i + s, 1.0);
      }
    }
  }
  SparseMatrix d(2 * n, n);
  d.setFromTriplets(t.begin(), t.end());
  d.makeCompressed();
  return d;
}

void HuberParams::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("huber: lambda must be >= 0");
  if (!(rho > 0.0)) throw std::invalid_argument("huber: rho must be > 0");
}

void KLParams::validate() const {
  if (!(beta_dom > 0.0)) throw std::invalid_argument("kl: beta_dom must be > 0");
}

double pseudo_huber(const Vector& a, double rho) {
  // sqrt(rho^2 + a^2) - rho written to avoid cancellation for small |a|.
  return (a.array().square() / ((rho * rho + a.array().square()).sqrt() + rho)).sum();
}

Vector pseudo_huber_derivative(const Vector& a, double rho) {
  return (a.array() / (rho * rho + a.array().square()).sqrt()).matrix();
}

HuberTvObjective::HuberTvObjective(SparseMatrix a, SparseMatrix d, Vector b, HuberParams params)
    : a_(std::move(a)), d_(std::move(d)), b_(std::move(b)), params_(params) {
  params_.validate();
  if (d_.cols() != a_.cols()) throw DimensionError("HuberTvObjective: A and D column counts differ");
  require_size(b_, a_.rows(), "HuberTvObjective data");
  at_ = transposed(a_);
  dt_ = transposed(d_);
}

double HuberTvObjective::value(const Vector& y) const {
  require_size(y, dim(), "HuberTvObjective::value");
  const Vector r = a_ * y - b_;
  return 0.5 * r.squaredNorm() + params_.lambda * pseudo_huber(d_ * y, params_.rho);
}

Vector HuberTvObjective::gradient(const Vector& y) const {
  require_size(y, dim(), "HuberTvObjective::gradient");
  const Vector r = a_ * y - b_;
  Vector g = at_ * r;
  if (params_.lambda != 0.0) g += params_.lambda * (dt_ * pseudo_huber_derivative(d_ * y, params_.rho));
  return g;
}

Vector HuberTvObjective::hessian_vec(const Vector& y, const Vector& v) const {
  require_size(y, dim(), "HuberTvObjective::hessian_vec point");
  require_size(v, dim(), "HuberTvObjective::hessian_vec direction");
  Vector out = at_ * (a_ * v);
  if (params_.lambda != 0.0) {
    const double r2 = params_.rho * params_.rho;
    const Vector dy = d_ * y;
    const Vector w = (r2 / (r2 + dy.array().square()).pow(1.5)).matrix();
    out += params_.lambda * (dt_ * w.cwiseProduct(d_ * v));
  }
  return out;
}

KlObjective::KlObjective(SparseMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  require_size(b_, a_.rows(), "KlObjective data");
  if (!(b_.array() > 0.0).all()) throw DomainError("KlObjective: data must be positive");
  at_ = transposed(a_);
}

Vector KlObjective::forward(const Vector& y) const {
  require_size(y, dim(), "KlObjective");
  Vector ay = a_ * y;
  if (!(ay.array() > 0.0).all()) throw DomainError("KlObjective: Ay must be positive");
  return ay;
}

double KlObjective::value(const Vector& y) const {
  const Vector ay = forward(y);
  return (ay.array() * (ay.array() / b_.array()).log() - ay.array() + b_.array()).sum();
}

Vector KlObjective::gradient(const Vector& y) const {
  const Vector ay = forward(y);
  return at_ * (ay.array() / b_.array()).log().matrix();
}

Vector KlObjective::hessian_vec(const Vector& y, const Vector& v) const {
  require_size(v, dim(), "KlObjective::hessian_vec direction");
  const Vector ay = forward(y);
  return at_ * ((a_ * v).array() / ay.array()).matrix();
}

LipschitzEstimate lipschitz_estimate(const SparseMatrix& a, const HuberParams& params, std::optional<double> omega) {
  params.validate();
  LipschitzEstimate est;
  const NormEstimate na = operator_norm_2(a);
  const NormEstimate nat = operator_norm_2(transposed(a));
  est.norm_a = na.value;
  est.norm_at = nat.value;
  est.converged = na.converged && nat.converged;
  est.l_psi = est.norm_a * est.norm_at + 8.0 * params.lambda / params.rho;
  est.omega = omega.value_or(0.0);
  est.l_phi_bound = est.omega * est.omega * est.l_psi;
  return est;
}

LipschitzEstimate lipschitz_estimate(const Projector& projector, const HuberParams& params) {
  std::optional<double> omega;
  if (projector.grid.can_coarsen()) omega = build_full_weighting(projector.grid).omega();
  return lipschitz_estimate(projector.a, params, omega);
}

std::string_view to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::disks: return "disks";
    case PhantomKind::bone_like: return "bone_like";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(std::string_view name) {
  if (name == "disks") return PhantomKind::disks;
  if (name == "bone_like") return PhantomKind::bone_like;
  throw std::invalid_argument("unknown phantom kind '" + std::string(name) + "'");
}

Vector rasterize_disks(Grid2D grid, const std::vector<Disk>& disks) {
  std::vector<Ellipse> shapes;
  const double s = grid.side;
  for (const auto& d : disks) shapes.push_back({d.cx / s, d.cy / s, d.r / s, d.r / s, 0.0, d.value});
  return rasterize_ellipses(grid, shapes);
}

Vector make_phantom(Grid2D grid, PhantomKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Ellipse> shapes;
  if (kind == PhantomKind::disks) {
    shapes.push_back({0.5, 0.5, 0.44, 0.40, 0.0, 0.25});
    const int count = 6 + static_cast<int>(unit(rng) * 5);
    for (int i = 0; i < count; ++i) {
      const double r = between(0.04, 0.12);
      const double ang = between(0.0, 2.0 * std::numbers::pi);
      const double dist = between(0.0, 0.36 - r);
      shapes.push_back({0.5 + dist * std::cos(ang), 0.5 + 0.9 * dist * std::sin(ang), r, r, 0.0,
                        between(0.4, 1.0)});
    }
  } else {
    // Cortical shell around a marrow cavity with trabecular pores.
    shapes.push_back({0.5, 0.5, 0.42, 0.34, 0.3, 1.0});
    shapes.push_back({0.5, 0.5, 0.33, 0.25, 0.3, 0.45});
    const int pores = 14 + static_cast<int>(unit(rng) * 8);
    for (int i = 0; i < pores; ++i) {
      const double ang = between(0.0, 2.0 * std::numbers::pi);
      const double dist = between(0.0, 0.2);
      const double rx = between(0.015, 0.045);
      shapes.push_back({0.5 + dist * std::cos(ang), 0.5 + 0.75 * dist * std::sin(ang), rx,
                        rx * between(0.6, 1.0), between(0.0, std::numbers::pi), between(0.0, 0.15)});
    }
  }
  return rasterize_ellipses(grid, shapes);
}

Vector downsample(Grid2D fine, const Vector& image) {
  require_size(image, fine.size(), "downsample");
  const Grid2D coarse = fine.coarser();
  Vector out(coarse.size());
  for (int r = 0; r < coarse.side; ++r) {
    for (int c = 0; c < coarse.side; ++c) {
      const Index f = Index(2 * r) * fine.side + 2 * c;
      out[Index(r) * coarse.side + c] =
          0.25 * (image[f] + image[f + 1] + image[f + fine.side] + image[f + fine.side + 1]);
    }
  }
  return out;
}

TomographyProblem build_huber_tv_problem(const TomographySetup& setup) {
  setup.huber.validate();
  LevelData data = level_data(setup);
  std::vector<ObjectiveHierarchy::Level> levels;
  for (std::size_t l = 0; l < data.grids.size(); ++l) {
    const auto& p = data.projectors[l];
    Vector b = p.a * data.phantoms[l];
    levels.push_back({data.grids[l], std::make_shared<HuberTvObjective>(p.a, forward_difference(data.grids[l]),
                                                                          std::move(b), setup.huber)});
  }
  const Index n = data.grids.front().size();
  return TomographyProblem{ObjectiveHierarchy(std::move(levels), level_transfers(data.grids)),
                           std::move(data.projectors), std::move(data.phantoms), std::nullopt, Vector::Zero(n)};
}

TomographyProblem build_kl_problem(const TomographySetup& setup) {
  setup.kl.validate();
  if (!(setup.kl_background > 0.0)) throw std::invalid_argument("tomography: kl_background must be > 0");
  LevelData data = level_data(setup);
  std::vector<ObjectiveHierarchy::Level> levels;
  Vector b_fine;
  for (std::size_t l = 0; l < data.grids.size(); ++l) {
    const auto& p = data.projectors[l];
    data.phantoms[l].array() += setup.kl_background;
    Vector b = p.a * data.phantoms[l];
    if (l == 0) b_fine = b;
    levels.push_back({data.grids[l], std::make_shared<KlObjective>(p.a, std::move(b))});
  }
  const auto& a0 = data.projectors.front().a;
  const Index n = a0.cols();
  const double mass = (a0 * Vector::Ones(n)).sum();
  const double level = std::max(setup.kl.beta_dom, b_fine.sum() / mass);
  return TomographyProblem{ObjectiveHierarchy(std::move(levels), level_transfers(data.grids)),
                           std::move(data.projectors), std::move(data.phantoms),
                           Box::lower_bounded(n, setup.kl.beta_dom), Vector::Constant(n, level)};
}

}  // namespace mlopt
