#pragma once

#include <stdexcept>
#include <string>

namespace dpattack {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DPATTACK_DEFINE_ERROR(Name) \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  };

DPATTACK_DEFINE_ERROR(ChannelMismatch)
DPATTACK_DEFINE_ERROR(ShapeError)
DPATTACK_DEFINE_ERROR(UnsupportedNorm)
DPATTACK_DEFINE_ERROR(BlockSizeError)
DPATTACK_DEFINE_ERROR(LevelError)
DPATTACK_DEFINE_ERROR(OracleUnavailable)
DPATTACK_DEFINE_ERROR(BudgetExhausted)
DPATTACK_DEFINE_ERROR(CapabilityError)
DPATTACK_DEFINE_ERROR(TrainingFailed)
DPATTACK_DEFINE_ERROR(DegenerateInput)
DPATTACK_DEFINE_ERROR(NotAdversarialAtMax)
DPATTACK_DEFINE_ERROR(InitFailed)
DPATTACK_DEFINE_ERROR(EmptyDataset)
DPATTACK_DEFINE_ERROR(WriteError)
DPATTACK_DEFINE_ERROR(FormatError)

#undef DPATTACK_DEFINE_ERROR

}  // namespace dpattack
