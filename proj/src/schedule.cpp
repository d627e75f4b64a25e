#include "netgeom/schedule.hpp"

#include <cmath>

#include "netgeom/errors.hpp"

namespace netgeom {

double Schedule::at(int epoch) const {
  switch (kind) {
    case Kind::Constant:
      return v0;
    case Kind::StepDecay:
      return v0 * std::pow(factor, epoch / every);
    case Kind::LinearDecay: {
      if (epoch >= end_epoch) return v1;
      double t = static_cast<double>(epoch) / end_epoch;
      return v0 + (v1 - v0) * t;
    }
  }
  return v0;
}

Schedule Schedule::constant(double v) {
  Schedule s;
  s.kind = Kind::Constant;
  s.v0 = v;
  return s;
}

Schedule Schedule::step(double v0, double factor, int every) {
  if (every <= 0) throw ConfigError("step schedule: every must be positive");
  Schedule s;
  s.kind = Kind::StepDecay;
  s.v0 = v0;
  s.factor = factor;
  s.every = every;
  return s;
}

Schedule Schedule::linear(double v0, double v1, int end_epoch) {
  if (end_epoch <= 0) throw ConfigError("linear schedule: end_epoch must be positive");
  Schedule s;
  s.kind = Kind::LinearDecay;
  s.v0 = v0;
  s.v1 = v1;
  s.end_epoch = end_epoch;
  return s;
}

}  // namespace netgeom
