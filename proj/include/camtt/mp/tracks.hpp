#pragma once

#include "camtt/core.hpp"
#include "camtt/mp/association.hpp"
#include "camtt/mp/filter.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace camtt::mp {

enum class TrackStatus { tentative, confirmed, terminated };

inline std::string to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::tentative: return "tentative";
    case TrackStatus::confirmed: return "confirmed";
    case TrackStatus::terminated: return "terminated";
  }
  return "terminated";
}

struct TrackerConfig {
  MotionModel motion;
  DetectionModelParams detection;
  BpConfig bp;
  double gate = 13.8;              // squared Mahalanobis
  double visibility_stay = 0.85;
  double visibility_threshold = 0.5;
  int confirm_hits = 3;
  int confirm_window = 5;
  int terminate_after = 3;         // successive scans below threshold
  int max_miss_streak = 3;
  double initial_visibility = 0.5;
  int max_tracks = 64;
  double birth_clutter_belief = 0.5;  // spawn when b(clutter) exceeds this
  double velocity_inflation = 0.01;   // m/s
  double accel_std = 1.0e-3;          // m/s^2

  void validate() const {
    motion.validate();
    detection.validate();
    require(gate > 0.0, "tracker.gate must be > 0");
    require(visibility_stay >= 0.0 && visibility_stay <= 1.0, "tracker.visibility_stay must lie in [0,1]");
    require(confirm_hits >= 1 && confirm_window >= confirm_hits, "tracker confirm rule must satisfy 1 <= M <= N");
    require(terminate_after >= 1, "tracker.terminate_after must be >= 1");
    require(max_miss_streak >= 0, "tracker.max_miss_streak must be >= 0");
    require(initial_visibility >= 0.0 && initial_visibility <= 1.0, "tracker.initial_visibility must lie in [0,1]");
    require(max_tracks >= 1, "tracker.max_tracks must be >= 1");
    require(bp.tolerance > 0.0 && bp.max_iterations >= 1, "tracker BP settings must be positive");
  }
};

struct Track {
  int id = 0;
  KinematicBelief kinematic;
  VisibilityBelief visibility;
  TrackStatus status = TrackStatus::tentative;
  int miss_streak = 0;
  int low_streak = 0;
  std::deque<bool> confirm_window;  // most recent last
  int birth_scan = 0;
};

struct TrackUpdate {
  std::vector<Track> alive;
  std::vector<Track> terminated;
};

/// Confirmation, termination and birth after the beliefs of `tracks` have
/// been updated with `assoc`. Measurements whose clutter belief exceeds
/// cfg.birth_clutter_belief start tentative tracks.
inline TrackUpdate manage_tracks(std::vector<Track> tracks, const AssociationBeliefs& assoc,
                                 std::span<const Vec2> meas, int scan, const TrackerConfig& cfg, int& next_id) {
  if (assoc.num_targets() != tracks.size() || assoc.num_measurements() != meas.size())
    throw SizeError("association beliefs do not match tracks/measurements");
  TrackUpdate out;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    Track& t = tracks[i];
    const bool visible = t.visibility.p_visible > cfg.visibility_threshold;
    t.confirm_window.push_back(visible);
    while (static_cast<int>(t.confirm_window.size()) > cfg.confirm_window) t.confirm_window.pop_front();
    t.low_streak = t.visibility.p_visible < cfg.visibility_threshold ? t.low_streak + 1 : 0;
    t.miss_streak = assoc.missed(i) > 0.5 ? t.miss_streak + 1 : 0;

    if (t.status == TrackStatus::tentative &&
        std::count(t.confirm_window.begin(), t.confirm_window.end(), true) >= cfg.confirm_hits)
      t.status = TrackStatus::confirmed;
    if (t.low_streak >= cfg.terminate_after || t.miss_streak > cfg.max_miss_streak) {
      t.status = TrackStatus::terminated;
      out.terminated.push_back(std::move(t));
    } else {
      out.alive.push_back(std::move(t));
    }
  }

  for (std::size_t j = 0; j < meas.size(); ++j) {
    if (assoc.clutter(j) <= cfg.birth_clutter_belief) continue;
    Track t;
    t.id = next_id++;
    t.kinematic = two_point_init(meas[j], cfg.motion, cfg.velocity_inflation, cfg.accel_std);
    t.visibility = {cfg.initial_visibility};
    t.birth_scan = scan;
    out.alive.push_back(std::move(t));
  }

  // Over capacity: drop the least visible tentative tracks.
  const auto cap = static_cast<std::size_t>(cfg.max_tracks);
  if (out.alive.size() > cap) {
    std::vector<std::size_t> tentative;
    for (std::size_t i = 0; i < out.alive.size(); ++i)
      if (out.alive[i].status == TrackStatus::tentative) tentative.push_back(i);
    std::stable_sort(tentative.begin(), tentative.end(), [&](std::size_t a, std::size_t b) {
      return out.alive[a].visibility.p_visible < out.alive[b].visibility.p_visible;
    });
    std::vector<bool> drop(out.alive.size(), false);
    std::size_t excess = out.alive.size() - cap;
    for (std::size_t k = 0; k < tentative.size() && excess > 0; ++k, --excess) drop[tentative[k]] = true;
    std::vector<Track> kept;
    for (std::size_t i = 0; i < out.alive.size(); ++i)
      if (!drop[i]) kept.push_back(std::move(out.alive[i]));
    out.alive = std::move(kept);
  }
  return out;
}

struct TrackHistoryRow {
  int scan = 0;
  int track_id = 0;
  TrackStatus status = TrackStatus::tentative;
  Vec3 mean = Vec3::Zero();
  double p_visible = 0.0;
};

inline void write_track_history(std::ostream& os, std::span<const TrackHistoryRow> rows) {
  os << "scan,track_id,status,range,range_rate,range_accel,p_visible\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.scan << ',' << r.track_id << ',' << to_string(r.status) << ',' << r.mean(0) << ',' << r.mean(1) << ','
       << r.mean(2) << ',' << r.p_visible << '\n';
}

}  // namespace camtt::mp
