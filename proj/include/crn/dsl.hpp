#pragma once

#include "crn/kinetics.hpp"
#include "crn/network.hpp"

#include <string>
#include <string_view>

namespace crn {

struct ParsedNetwork {
  ReactionNetwork network;
  KineticsSpec kinetics;
};

/// Parses the line-oriented network format:
///
///   # comment
///   species: A B
///   A + 2 B -> 3 B , 0.5
///   0 <-> A , 1.0 , 2.0
///   theta A power A=1 d=2 overrides 1=0.5 2=3
///
/// Throws ParseError carrying the 1-based line and column of the problem.
ParsedNetwork parse_network(std::string_view text);

// Reads a file and parses it; a missing or unreadable file is a ParseError.
ParsedNetwork load_network(const std::string& path);

/// Canonical text form. parse_network(serialize_network(n, k)) == (n, k), and
/// serializing a re-parsed document reproduces it byte for byte. Reversible
/// pairs are written as two reactions; species using mass action get no
/// theta line.
std::string serialize_network(const ReactionNetwork& net, const KineticsSpec& kin);

// Shortest decimal that reads back to the same double.
std::string format_real(double value);

}  // namespace crn
