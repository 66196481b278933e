#include "mlopt/lbfgs.hpp"

#include <vector>

namespace mlopt {

Vector LbfgsMemory::direction(const Vector& g) const {
  Vector q = g;
  std::vector<double> alpha(pairs_.size());
  for (std::size_t i = pairs_.size(); i-- > 0;) {
    alpha[i] = pairs_[i].rho * pairs_[i].s.dot(q);
    q -= alpha[i] * pairs_[i].y;
  }
  if (!pairs_.empty()) {
    // H0 = gamma I with gamma = s'y / y'y from the newest pair.
    const Pair& last = pairs_.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const double b = pairs_[i].rho * pairs_[i].y.dot(q);
    q += (alpha[i] - b) * pairs_[i].s;
  }
  return -q;
}

bool LbfgsMemory::update(const Vector& s, const Vector& y) {
  const double sy = s.dot(y);
  if (!(sy > 1e-10 * s.norm() * y.norm())) return false;
  if (static_cast<int>(pairs_.size()) == capacity_) pairs_.pop_front();
  pairs_.push_back(Pair{s, y, 1.0 / sy});
  return true;
}

}  // namespace mlopt
