#include "mlopt/objective.hpp"

#include <string>

namespace mlopt {

Vector Objective::hessian_vec(const Vector& /*y*/, const Vector& /*v*/) const {
  throw CapabilityError("objective does not provide Hessian-vector products");
}

struct ObjectiveHierarchy::Counters {
  std::atomic<std::uint64_t> value{0};
  std::atomic<std::uint64_t> gradient{0};
  std::atomic<std::uint64_t> hessian_vec{0};
};

class ObjectiveHierarchy::CountedView final : public Objective {
 public:
  CountedView(std::shared_ptr<const Objective> inner, Counters* counters)
      : inner_(std::move(inner)), counters_(counters) {}

  Index dim() const override { return inner_->dim(); }
  double value(const Vector& y) const override {
    require_size(y, inner_->dim(), "value");
    counters_->value.fetch_add(1, std::memory_order_relaxed);
    return inner_->value(y);
  }
  Vector gradient(const Vector& y) const override {
    require_size(y, inner_->dim(), "gradient");
    counters_->gradient.fetch_add(1, std::memory_order_relaxed);
    return inner_->gradient(y);
  }
  bool has_hessian_vec() const override { return inner_->has_hessian_vec(); }
  Vector hessian_vec(const Vector& y, const Vector& v) const override {
    if (!inner_->has_hessian_vec()) {
      throw CapabilityError("objective does not provide Hessian-vector products");
    }
    require_size(y, inner_->dim(), "hessian_vec");
    require_size(v, inner_->dim(), "hessian_vec");
    counters_->hessian_vec.fetch_add(1, std::memory_order_relaxed);
    return inner_->hessian_vec(y, v);
  }
  bool is_quadratic() const override { return inner_->is_quadratic(); }

 private:
  std::shared_ptr<const Objective> inner_;
  Counters* counters_;
};

ObjectiveHierarchy::ObjectiveHierarchy(std::vector<Level> levels, std::vector<TransferPair> transfers)
    : levels_(std::move(levels)), transfers_(std::move(transfers)) {
  if (levels_.empty()) throw std::invalid_argument("ObjectiveHierarchy: no levels");
  if (transfers_.size() + 1 != levels_.size()) {
    throw std::invalid_argument("ObjectiveHierarchy: need exactly one transfer pair per level gap");
  }
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (!levels_[l].objective) throw std::invalid_argument("ObjectiveHierarchy: null objective");
    if (levels_[l].grid && levels_[l].grid->size() != levels_[l].objective->dim()) {
      throw DimensionError("ObjectiveHierarchy: grid size does not match objective dimension at level " +
                           std::to_string(l));
    }
  }
  for (std::size_t l = 0; l + 1 < levels_.size(); ++l) {
    const auto& fine = levels_[l];
    const auto& coarse = levels_[l + 1];
    if (fine.grid && coarse.grid && fine.grid->side != 2 * coarse.grid->side) {
      throw std::invalid_argument("ObjectiveHierarchy: level " + std::to_string(l) +
                                  " side must be twice the next level's side");
    }
    if (transfers_[l].fine_dim() != fine.objective->dim() ||
        transfers_[l].coarse_dim() != coarse.objective->dim()) {
      throw DimensionError("ObjectiveHierarchy: transfer pair " + std::to_string(l) +
                           " does not match level dimensions");
    }
  }
  counters_ = std::make_unique<Counters[]>(levels_.size());
  views_.reserve(levels_.size());
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    views_.push_back(std::make_unique<CountedView>(levels_[l].objective, &counters_[l]));
  }
}

ObjectiveHierarchy::~ObjectiveHierarchy() = default;
ObjectiveHierarchy::ObjectiveHierarchy(ObjectiveHierarchy&&) noexcept = default;
ObjectiveHierarchy& ObjectiveHierarchy::operator=(ObjectiveHierarchy&&) noexcept = default;

void ObjectiveHierarchy::check_level(LevelIndex ell) const {
  if (ell.ell >= levels_.size()) {
    throw std::out_of_range("level " + std::to_string(ell.ell) + " out of range (" +
                            std::to_string(levels_.size()) + " levels)");
  }
}

Index ObjectiveHierarchy::dim(LevelIndex ell) const {
  check_level(ell);
  return levels_[ell.ell].objective->dim();
}

const std::optional<Grid2D>& ObjectiveHierarchy::grid(LevelIndex ell) const {
  check_level(ell);
  return levels_[ell.ell].grid;
}

const TransferPair& ObjectiveHierarchy::transfer(LevelIndex ell) const {
  if (ell.ell + 1 >= levels_.size()) {
    throw std::out_of_range("no transfer pair below level " + std::to_string(ell.ell));
  }
  return transfers_[ell.ell];
}

double ObjectiveHierarchy::value(LevelIndex ell, const Vector& y) const {
  return level_objective(ell).value(y);
}

Vector ObjectiveHierarchy::gradient(LevelIndex ell, const Vector& y) const {
  return level_objective(ell).gradient(y);
}

bool ObjectiveHierarchy::has_hessian_vec(LevelIndex ell) const {
  return raw_objective(ell).has_hessian_vec();
}

Vector ObjectiveHierarchy::hessian_vec(LevelIndex ell, const Vector& y, const Vector& v) const {
  return level_objective(ell).hessian_vec(y, v);
}

const Objective& ObjectiveHierarchy::level_objective(LevelIndex ell) const {
  check_level(ell);
  return *views_[ell.ell];
}

const Objective& ObjectiveHierarchy::raw_objective(LevelIndex ell) const {
  check_level(ell);
  return *levels_[ell.ell].objective;
}

EvalCounts ObjectiveHierarchy::counts(LevelIndex ell) const {
  check_level(ell);
  const Counters& c = counters_[ell.ell];
  return {c.value.load(), c.gradient.load(), c.hessian_vec.load()};
}

void ObjectiveHierarchy::reset_counts() {
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    counters_[l].value = 0;
    counters_[l].gradient = 0;
    counters_[l].hessian_vec = 0;
  }
}

}  // namespace mlopt
