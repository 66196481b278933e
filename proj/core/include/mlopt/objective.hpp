#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mlopt/grid_transfer.hpp"
#include "mlopt/types.hpp"

namespace mlopt {

/// Smooth objective on R^n: value, gradient, and optionally Hessian-vector
/// products. Implementations are read-only after construction.
class Objective {
 public:
  virtual ~Objective() = default;

  [[nodiscard]] virtual Index dim() const = 0;
  [[nodiscard]] virtual double value(const Vector& y) const = 0;
  [[nodiscard]] virtual Vector gradient(const Vector& y) const = 0;

  [[nodiscard]] virtual bool has_hessian_vec() const { return false; }
  /// Returns Hess f(y) v without forming the Hessian. Throws CapabilityError
  /// unless has_hessian_vec().
  [[nodiscard]] virtual Vector hessian_vec(const Vector& y, const Vector& v) const;

  /// True when the Hessian is constant, so a single CG solve minimizes it.
  [[nodiscard]] virtual bool is_quadratic() const { return false; }
};

struct EvalCounts {
  std::uint64_t value = 0;
  std::uint64_t gradient = 0;
  std::uint64_t hessian_vec = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

/// An objective discretized on a stack of grids, finest first, together with
/// the transfer operators between consecutive levels.
///
/// Every evaluation made through the hierarchy (directly or through a
/// level_objective() view) bumps exactly one counter at exactly one level.
/// Counters are atomic; the objectives themselves are shared read-only.
class ObjectiveHierarchy {
 public:
  struct Level {
    std::optional<Grid2D> grid;
    std::shared_ptr<const Objective> objective;
  };

  /// `transfers[l]` links level l (fine) and level l+1 (coarse).
  ObjectiveHierarchy(std::vector<Level> levels, std::vector<TransferPair> transfers);

  ObjectiveHierarchy(const ObjectiveHierarchy&) = delete;
  ObjectiveHierarchy& operator=(const ObjectiveHierarchy&) = delete;
  ObjectiveHierarchy(ObjectiveHierarchy&&) noexcept;
  ObjectiveHierarchy& operator=(ObjectiveHierarchy&&) noexcept;
  ~ObjectiveHierarchy();

  [[nodiscard]] std::size_t num_levels() const { return levels_.size(); }
  [[nodiscard]] Index dim(LevelIndex ell) const;
  [[nodiscard]] const std::optional<Grid2D>& grid(LevelIndex ell) const;
  [[nodiscard]] const TransferPair& transfer(LevelIndex ell) const;

  [[nodiscard]] double value(LevelIndex ell, const Vector& y) const;
  [[nodiscard]] Vector gradient(LevelIndex ell, const Vector& y) const;
  [[nodiscard]] bool has_hessian_vec(LevelIndex ell) const;
  [[nodiscard]] Vector hessian_vec(LevelIndex ell, const Vector& y, const Vector& v) const;

  /// Counting view of one level, usable wherever an Objective is expected.
  /// The reference stays valid for the lifetime of the hierarchy.
  [[nodiscard]] const Objective& level_objective(LevelIndex ell) const;
  /// The underlying (uncounted) objective.
  [[nodiscard]] const Objective& raw_objective(LevelIndex ell) const;

  [[nodiscard]] EvalCounts counts(LevelIndex ell) const;
  void reset_counts();

 private:
  struct Counters;
  class CountedView;

  void check_level(LevelIndex ell) const;

  std::vector<Level> levels_;
  std::vector<TransferPair> transfers_;
  std::unique_ptr<Counters[]> counters_;
  std::vector<std::unique_ptr<CountedView>> views_;
};

}  // namespace mlopt
