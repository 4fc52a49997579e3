#pragma once

#include <optional>

#include "exosim/controller.hpp"
#include "exosim/human.hpp"
#include "exosim/walker.hpp"

namespace exosim {

/// Wires the surrogate wearer and, optionally, the exoskeleton controller
/// into simulator callbacks. Owns both controller states for one run, so it
/// must outlive the SimControllers it hands out.
class ClosedLoop {
 public:
  ClosedLoop(const WalkerParams& params, const HumanModel& human)
      : params_(params), human_(human) {}

  ClosedLoop(const WalkerParams& params, const HumanModel& human,
             const ExoConfig& exo)
      : params_(params), human_(human), exo_(exo) {}

  SimControllers controllers();

  HumanSurrogate& human() { return human_; }
  NegativeDampingController* exo() { return exo_ ? &*exo_ : nullptr; }
  const WalkerParams& params() const { return params_; }

 private:
  WalkerParams params_;
  HumanSurrogate human_;
  std::optional<NegativeDampingController> exo_;
};

}  // namespace exosim
