#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cosmicbell/cosmology.hpp"

namespace cosmicbell {

/// A source on the conformal diagram's spatial axis. The 1+1D diagram is
/// exact only for sight lines along one line through Earth, so phi_deg must
/// be 0 or 180 (the side of the sky the source sits on).
struct DiagramSource {
  std::string id;
  double z = 0.0;
  double phi_deg = 0.0;
};

/// One polyline of the diagram in (signed comoving distance, conformal
/// time) coordinates.
struct DiagramPolyline {
  std::string kind;   // earth_worldline | now_surface | source_worldline |
                      // lightcone | pair_overlap | earth_overlap
  std::string label;
  std::vector<std::array<double, 2>> points;  // (distance_mpc, eta_mpc)
};

/// Worldlines, past light cones, and (when margins are negative) overlap
/// polygons for the given sources. Empty input yields the axes only
/// (Earth worldline and the now surface).
std::vector<DiagramPolyline> conformal_diagram(
    std::span<const DiagramSource> sources, const CosmologyParams& params);

/// CSV with header kind,label,vertex,comoving_distance_mpc,conformal_time_mpc.
std::string diagram_to_csv(std::span<const DiagramPolyline> polylines);

}  // namespace cosmicbell
