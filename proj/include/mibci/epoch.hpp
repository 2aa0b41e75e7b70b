#pragma once

#include "mibci/types.hpp"

namespace mibci {

// Keeps sample columns [round(t_start * fs), round(t_end * fs)) of the trial;
// times are seconds from the first sample. Throws DataError when the window
// is empty, inverted, or leaves the trial.
Trial epoch_window(const Trial& trial, double t_start, double t_end);

// Motor-imagery window used throughout: 0.5 s to 2.5 s after the cue.
inline constexpr double kCueOnsetSeconds = 2.0;
inline constexpr double kWindowStartAfterCue = 0.5;
inline constexpr double kWindowEndAfterCue = 2.5;

// Cuts the post-cue window out of a full-length competition trial (cue at 2 s).
inline Trial epoch_motor_imagery(const Trial& trial) {
  return epoch_window(trial, kCueOnsetSeconds + kWindowStartAfterCue,
                      kCueOnsetSeconds + kWindowEndAfterCue);
}

}  // namespace mibci
