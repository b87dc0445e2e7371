#pragma once

#include <string>

namespace fvg::fvops {

enum class ConvectionScheme { Upwind, Central, SOU, QUICK };
enum class DiffusionMode { None, Minimum, Orthogonal, OverRelaxed };
enum class TimeScheme { BackwardEuler, CrankNicolson, ForwardEuler };

std::string to_string(ConvectionScheme s);
std::string to_string(DiffusionMode m);
std::string to_string(TimeScheme t);

/// Accepts the short names used in configs and on the command line
/// ("upwind", "central", "sou", "quick"; "none", "minimum", "orthogonal",
/// "over-relaxed"; "be", "cn", "fe"). Throws UnsupportedScheme.
ConvectionScheme parse_convection(const std::string& name);
DiffusionMode parse_diffusion(const std::string& name);
TimeScheme parse_time_scheme(const std::string& name);

}  // namespace fvg::fvops
