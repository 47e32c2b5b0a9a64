#pragma once

#include "pgamech/pga.hpp"
#include "pgamech/thread.hpp"

namespace pgamech {

/// Functional thread extraction: jumps are resolved away, pure jump cycles
/// and jumps off the end yield D.
ThreadGraph extract_functional(const InstrSeq& seq);

/// Mechanistic thread extraction: every executed jump contributes exactly
/// one delay, whatever its counter. #0 yields D without a delay.
ThreadGraph extract_mechanistic(const InstrSeq& seq);

}  // namespace pgamech
