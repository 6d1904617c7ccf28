#pragma once

#include "bee/param.hpp"

namespace bee {

// Adam with a per-parameter-group learning rate (heads/GCN vs. unfrozen
// encoder layers train at different rates).
struct Adam {
  struct Slot {
    Param* p;
    double lr;
    Matrix m, v;
  };

  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long long t = 0;
  std::vector<Slot> slots;

  void add(Param* p, double lr) {
    slots.push_back({p, lr, Matrix(p->value.rows, p->value.cols), Matrix(p->value.rows, p->value.cols)});
  }
  void add_all(const std::vector<Param*>& params, double lr) {
    for (Param* p : params) add(p, lr);
  }

  void step();
  void zero_grads() {
    for (Slot& s : slots) s.p->zero_grad();
  }
};

}  // namespace bee
