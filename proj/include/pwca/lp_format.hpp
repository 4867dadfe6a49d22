#pragma once

#include <iosfwd>

#include "pwca/problem.hpp"

namespace pwca {

/// CPLEX-style LP text: objective, Subject To, Bounds (every variable, in
/// declaration order), Binaries, End. Coefficients carry 17 significant
/// digits so a read-back problem compares equal. Names that the format
/// cannot carry raise kNaming.
void export_lp(std::ostream& out, const MilpProblem& problem);

/// Reads the subset of the format written by export_lp (plus comments,
/// free-form line breaks and "free" bounds). Variables are numbered by first
/// appearance in Bounds and Binaries, then objective, then rows. Throws
/// kParse on malformed input.
MilpProblem read_lp(std::istream& in);

}  // namespace pwca
