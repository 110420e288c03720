// cli.hpp - the exitwise command-line front end.
//
//   exitwise bound      --config PATH   E|τ₁−τ₂| vs the sup bound per scenario
//   exitwise identities --config PATH   paired checks of the proof identities
//   exitwise mfpt       --config PATH   FD field of v on r1 plus MC probes
//   exitwise sweep     [--config PATH]  bound over a shift sweep (default: the
//                                       unit-interval example, shifts 0.05..0.45)
//
// Common flags: --seed U64, --workers N (default $EXITWISE_WORKERS), --out DIR,
// --format csv|json|both, --n COUNT, --dt STEP.
//
// Exit status: 0 ok, 1 configuration error, 2 bound violated / |z| > 4.
#pragma once

#include <ostream>

namespace exitwise {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitViolated = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exitwise
