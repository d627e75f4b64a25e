#pragma once

namespace netgeom {

// Scalar-vs-epoch schedule used for learning rates and the skip weight nu.
struct Schedule {
  enum class Kind { Constant, StepDecay, LinearDecay };
  Kind kind = Kind::Constant;
  double v0 = 0.0;
  double v1 = 0.0;      // LinearDecay target
  double factor = 1.0;  // StepDecay multiplier
  int every = 1;        // StepDecay period, epochs
  int end_epoch = 1;    // LinearDecay: epoch at which v1 is reached and held

  double at(int epoch) const;

  static Schedule constant(double v);
  static Schedule step(double v0, double factor, int every);
  static Schedule linear(double v0, double v1, int end_epoch);
};

}  // namespace netgeom
