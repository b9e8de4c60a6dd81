#include "cosmicbell/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cosmicbell {

namespace {

struct PlacedSource {
  std::string id;
  double x;    // signed comoving position on the axis
  double eta;  // emission conformal time
};

}  // namespace

std::vector<DiagramPolyline> conformal_diagram(
    std::span<const DiagramSource> sources, const CosmologyParams& params) {
  const double eta0 = conformal_age(params);

  std::vector<PlacedSource> placed;
  placed.reserve(sources.size());
  for (const auto& src : sources) {
    if (src.phi_deg != 0.0 && src.phi_deg != 180.0) {
      throw std::invalid_argument(
          "conformal_diagram: a 1+1D diagram is exact only for collinear "
          "sight lines; phi_deg must be 0 or 180 (source '" +
          src.id + "')");
    }
    if (src.z < 0.0) {
      throw std::invalid_argument("conformal_diagram: negative redshift for '" +
                                  src.id + "'");
    }
    const double sign = src.phi_deg == 0.0 ? 1.0 : -1.0;
    placed.push_back({src.id, sign * comoving_distance(src.z, params),
                      conformal_time(src.z, params)});
  }

  std::vector<DiagramPolyline> lines;
  const double x_extent =
      std::max(eta0, [&] {
        double m = 0.0;
        for (const auto& p : placed) {
          m = std::max(m, std::abs(p.x) + p.eta);
        }
        return m;
      }());

  lines.push_back({"earth_worldline", "earth", {{0.0, 0.0}, {0.0, eta0}}});
  lines.push_back(
      {"now_surface", "eta0", {{-x_extent, eta0}, {x_extent, eta0}}});

  for (const auto& p : placed) {
    lines.push_back(
        {"source_worldline", p.id, {{p.x, p.eta}, {p.x, eta0}}});
    // Past light cone down to the hot-big-bang surface eta = 0.
    lines.push_back({"lightcone",
                     p.id,
                     {{p.x - p.eta, 0.0}, {p.x, p.eta}, {p.x + p.eta, 0.0}}});
    // Overlap with Earth's worldline: the cone contains x = 0 for
    // eta <= eta_i - |x_i| when that is positive.
    const double earth_reach = p.eta - std::abs(p.x);
    if (earth_reach > 0.0) {
      lines.push_back(
          {"earth_overlap", p.id, {{0.0, 0.0}, {0.0, earth_reach}}});
    }
  }

  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      const PlacedSource& a = placed[i].x <= placed[j].x ? placed[i] : placed[j];
      const PlacedSource& b = placed[i].x <= placed[j].x ? placed[j] : placed[i];
      const double gap = b.x - a.x;
      // Cones cross at eta* = (eta_a + eta_b - gap) / 2; overlap iff > 0.
      const double eta_cross = 0.5 * (a.eta + b.eta - gap);
      if (eta_cross <= 0.0) continue;
      DiagramPolyline overlap;
      overlap.kind = "pair_overlap";
      overlap.label = a.id + "&" + b.id;
      if (gap >= std::abs(a.eta - b.eta)) {
        // Triangle between the inner cone edges and the eta = 0 surface;
        // the apex solves a.x + (a.eta - eta) = b.x - (b.eta - eta).
        const double x_left = b.x - b.eta;
        const double x_right = a.x + a.eta;
        const double x_apex = 0.5 * (a.x + b.x + a.eta - b.eta);
        overlap.points = {{x_left, 0.0},
                          {x_apex, eta_cross},
                          {x_right, 0.0},
                          {x_left, 0.0}};
      } else {
        // One cone nested inside the other: overlap is the smaller cone.
        const PlacedSource& inner = a.eta < b.eta ? a : b;
        overlap.points = {{inner.x - inner.eta, 0.0},
                          {inner.x, inner.eta},
                          {inner.x + inner.eta, 0.0},
                          {inner.x - inner.eta, 0.0}};
      }
      lines.push_back(std::move(overlap));
    }
  }
  return lines;
}

std::string diagram_to_csv(std::span<const DiagramPolyline> polylines) {
  std::ostringstream out;
  out << "kind,label,vertex,comoving_distance_mpc,conformal_time_mpc\n";
  out.precision(10);
  for (const auto& line : polylines) {
    for (std::size_t v = 0; v < line.points.size(); ++v) {
      out << line.kind << ',' << line.label << ',' << v << ','
          << line.points[v][0] << ',' << line.points[v][1] << "\n";
    }
  }
  return out.str();
}

}  // namespace cosmicbell
