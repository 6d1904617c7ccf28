#include "bee/optim.hpp"

#include <cmath>

namespace bee {

void Adam::step() {
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (Slot& s : slots) {
    for (int i = 0; i < s.p->value.size(); ++i) {
      const double g = s.p->grad.data[i];
      s.m.data[i] = beta1 * s.m.data[i] + (1.0 - beta1) * g;
      s.v.data[i] = beta2 * s.v.data[i] + (1.0 - beta2) * g * g;
      const double mhat = s.m.data[i] / bc1;
      const double vhat = s.v.data[i] / bc2;
      s.p->value.data[i] -= s.lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace bee
