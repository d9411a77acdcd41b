// Stage 3: rule-based model assembly. Sets are built from the extraction
// store, coverage tensors and costs are derived by rule (never extracted),
// constraint and objective templates are instantiated with fully numeric
// parameters, and the model is rendered to LaTeX and LP text.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schedmilp/extract.hpp"
#include "schedmilp/graph.hpp"
#include "schedmilp/identify.hpp"
#include "schedmilp/model.hpp"

namespace schedmilp {

// A scheduling period. Units are minutes since midnight for shift
// scheduling and day units (day k occupies [k-1, k)) for days-off
// scheduling; all horizon arithmetic is integer and modulo t_max.
struct Period {
  int id = 0;  // 1-based
  long start = 0;
  long end = 0;  // exclusive; may equal t_max on the wrapping period
  std::string label;
};

struct TimeGrid {
  ProblemType type = ProblemType::shift_scheduling;
  long t_max = 0;   // horizon length
  long t_size = 0;  // period length
  std::vector<Period> periods;
};

struct Shift {
  int id = 0;      // 1-based, global across workload groups
  long start = 0;  // minutes-of-day, or 0-based day offset
  long duration = 0;
  std::vector<std::pair<long, long>> breaks;  // (offset from start, length)
  std::string workload_type;                  // empty when not applicable
  double hours_per_day = 0.0;                 // days-off only
};

struct OvertimePolicy {
  long max_overtime_periods = 0;
  std::optional<double> cost_per_overtime_period;
};

struct DemandSpec {
  std::vector<double> lb;  // indexed by period, 0-based
  bool hours = false;      // demand counted in labour hours instead of heads
};

namespace detail {

inline double to_number(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end && *end == '\0' && end != s.c_str()) return d;
  }
  throw AssemblyError("cannot parse " + what + " as a number: " + v.dump());
}

inline long to_long(const json& v, const std::string& what) {
  double d = to_number(v, what);
  long l = static_cast<long>(d);
  if (static_cast<double>(l) != d) throw AssemblyError(what + " is not an integer: " + v.dump());
  return l;
}

// "HH:MM" or "H:MM", 24-hour; "24:00" maps to 1440.
inline long parse_hhmm(const std::string& s) {
  int h = 0, m = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &extra) != 2 || h < 0 || h > 24 || m < 0 ||
      m > 59 || (h == 24 && m != 0))
    throw AssemblyError("cannot parse time of day '" + s + "' (expected HH:MM)");
  return 60L * h + m;
}

// Durations in minutes: a bare number, "N minutes", or "N hours".
inline long parse_duration_minutes(const json& v) {
  if (v.is_number()) return to_long(v, "duration");
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    long n = 0;
    char unit[32] = {0};
    int got = std::sscanf(s.c_str(), "%ld %31s", &n, unit);
    if (got == 1) return n;
    if (got == 2) {
      std::string u(unit);
      if (u == "minutes" || u == "minute" || u == "min") return n;
      if (u == "hours" || u == "hour" || u == "h") return n * 60;
    }
  }
  throw AssemblyError("cannot parse duration: " + v.dump());
}

// "Day N", a weekday name, or a bare number; returns a 1-based day index.
inline long parse_day_index(const json& v) {
  if (v.is_number()) return to_long(v, "day index");
  if (!v.is_string()) throw AssemblyError("cannot parse day: " + v.dump());
  std::string s = v.get<std::string>();
  long n = 0;
  if (std::sscanf(s.c_str(), "Day %ld", &n) == 1) return n;
  static const std::map<std::string, long> kWeekdays = {
      {"Monday", 1}, {"Tuesday", 2}, {"Wednesday", 3}, {"Thursday", 4},
      {"Friday", 5}, {"Saturday", 6}, {"Sunday", 7}};
  auto it = kWeekdays.find(s);
  if (it != kWeekdays.end()) return it->second;
  char* end = nullptr;
  n = std::strtol(s.c_str(), &end, 10);
  if (end && *end == '\0' && end != s.c_str()) return n;
  throw AssemblyError("cannot parse day '" + s + "'");
}

// "7 days" / "7" -> 7.
inline long parse_day_count(const json& v) {
  if (v.is_number()) return to_long(v, "horizon");
  if (v.is_string()) {
    long n = 0;
    char unit[32] = {0};
    int got = std::sscanf(v.get<std::string>().c_str(), "%ld %31s", &n, unit);
    if (got >= 1) return n;
  }
  throw AssemblyError("cannot parse day count: " + v.dump());
}

// "0.5" or "1/2" -> 0.5.
inline double parse_fraction(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    long num = 0, den = 0;
    if (std::sscanf(s.c_str(), "%ld/%ld", &num, &den) == 2 && den != 0)
      return static_cast<double>(num) / static_cast<double>(den);
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end && *end == '\0' && end != s.c_str()) return d;
  }
  throw AssemblyError("cannot parse fraction: " + v.dump());
}

inline std::string fmt_num(double v) {
  long long ll = static_cast<long long>(v);
  if (static_cast<double>(ll) == v) return std::to_string(ll);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string minutes_to_hhmm(long m) {
  m %= 1440;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02ld:%02ld", m / 60, m % 60);
  return buf;
}

// Working sub-intervals of a shift relative to its start: [0, span) minus
// break windows. `span` is the duration plus any overtime extension.
inline std::vector<std::pair<long, long>> working_segments(const Shift& s, long span) {
  std::vector<std::pair<long, long>> segs = {{0, span}};
  auto breaks = s.breaks;
  std::sort(breaks.begin(), breaks.end());
  for (const auto& [off, len] : breaks) {
    long b0 = std::max(0L, off);
    long b1 = std::min(span, off + len);
    if (b0 >= b1) continue;
    std::vector<std::pair<long, long>> next;
    for (const auto& [a, b] : segs) {
      if (b1 <= a || b0 >= b) {
        next.emplace_back(a, b);
        continue;
      }
      if (a < b0) next.emplace_back(a, b0);
      if (b1 < b) next.emplace_back(b1, b);
    }
    segs = std::move(next);
  }
  return segs;
}

}  // namespace detail

// Coverage of one shift, optionally extended by `extension` time units,
// over the cyclic horizon. Extensions beyond one full horizon add nothing
// modulo t_max and are clamped.
inline std::vector<int> coverage_row(const TimeGrid& grid, const Shift& shift,
                                     long extension = 0) {
  long span = shift.duration + extension;
  if (span > grid.t_max) span = grid.t_max;
  const auto segs = detail::working_segments(shift, span);

  std::vector<int> row(grid.periods.size(), 0);
  for (std::size_t t = 0; t < grid.periods.size(); ++t) {
    const Period& p = grid.periods[t];
    bool covered = false;
    for (const auto& [u, v] : segs) {
      const long a = shift.start + u;
      const long b = shift.start + v;
      for (int k = 0; k < 3 && !covered; ++k) {
        const long p0 = p.start + k * grid.t_max;
        const long p1 = p.end + k * grid.t_max;
        if (std::max(a, p0) < std::min(b, p1)) covered = true;
      }
      if (covered) break;
    }
    row[t] = covered ? 1 : 0;
  }
  return row;
}

// Binary tensor a[t][s]: shift s works during period t.
inline std::vector<std::vector<int>> coverage_matrix(const TimeGrid& grid,
                                                     const std::vector<Shift>& shifts) {
  std::vector<std::vector<int>> a(grid.periods.size(), std::vector<int>(shifts.size(), 0));
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    std::vector<int> row = coverage_row(grid, shifts[s]);
    for (std::size_t t = 0; t < row.size(); ++t) a[t][s] = row[t];
  }
  return a;
}

// Binary tensor v[t][o][s]: shift s extended by o overtime periods works
// during period t. The o = 0 slice equals the plain coverage matrix.
inline std::vector<std::vector<std::vector<int>>> overtime_coverage(
    const TimeGrid& grid, const std::vector<Shift>& shifts, const OvertimePolicy& policy) {
  if (policy.max_overtime_periods < 0) throw AssemblyError("negative overtime period bound");
  const std::size_t nt = grid.periods.size();
  const std::size_t no = static_cast<std::size_t>(policy.max_overtime_periods) + 1;
  std::vector<std::vector<std::vector<int>>> v(
      nt, std::vector<std::vector<int>>(no, std::vector<int>(shifts.size(), 0)));
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    for (std::size_t o = 0; o < no; ++o) {
      std::vector<int> row = coverage_row(grid, shifts[s], static_cast<long>(o) * grid.t_size);
      for (std::size_t t = 0; t < nt; ++t) v[t][o][s] = row[t];
    }
  }
  return v;
}

// Builds the period grid from the store. Shift-type periods carry HH:MM
// boundaries with the final period allowed to wrap ("00:00" end); days-off
// periods are day labels.
inline TimeGrid build_periods(const ExtractionStore& store, ProblemType type) {
  if (!store.has("set of periods")) throw AssemblyError("no 'set of periods' extraction");
  const json& entry = store.at("set of periods");
  const json& value = entry.at("value");
  if (!value.is_array() || value.empty()) throw AssemblyError("'set of periods' value is empty");
  const json details = entry.value("details", json::object());

  TimeGrid grid;
  grid.type = type;

  if (type == ProblemType::days_off_scheduling) {
    grid.t_size = 1;
    long k = 0;
    for (const auto& el : value) {
      Period p;
      p.id = static_cast<int>(detail::to_long(el.at("period_id"), "period_id"));
      if (p.id != ++k) throw AssemblyError("period ids are not contiguous from 1");
      p.start = k - 1;
      p.end = k;
      p.label = el.at("day").is_string() ? el.at("day").get<std::string>() : el.at("day").dump();
      grid.periods.push_back(std::move(p));
    }
    grid.t_max = k;
    if (details.contains("horizon")) {
      long h = detail::parse_day_count(details.at("horizon"));
      if (h != grid.t_max)
        throw AssemblyError("inconsistent horizon: details say " + std::to_string(h) +
                            " days but " + std::to_string(grid.t_max) + " periods were listed");
    }
    return grid;
  }

  const long horizon_hint =
      details.contains("horizon") ? detail::to_long(details.at("horizon"), "horizon") : 1440;

  long k = 0;
  long span = -1;
  for (const auto& el : value) {
    Period p;
    p.id = static_cast<int>(detail::to_long(el.at("period_id"), "period_id"));
    if (p.id != ++k) throw AssemblyError("period ids are not contiguous from 1");
    long start = detail::parse_hhmm(el.at("start_time").get<std::string>());
    long end = detail::parse_hhmm(el.at("end_time").get<std::string>());
    if (end <= start) end += horizon_hint;  // wraps past the horizon boundary
    p.start = start;
    p.end = end;
    p.label = detail::minutes_to_hhmm(start) + "-" + detail::minutes_to_hhmm(end);
    if (span < 0) span = end - start;
    if (end - start != span)
      throw AssemblyError("periods have unequal lengths (" + std::to_string(span) + " vs " +
                          std::to_string(end - start) + " minutes)");
    grid.periods.push_back(std::move(p));
  }
  grid.t_size = span;
  grid.t_max = span * k;

  // When the extraction reports horizon/increment/count, all three must be
  // consistent with the parsed periods.
  if (details.contains("horizon") || details.contains("increment") ||
      details.contains("total_periods")) {
    long h = details.contains("horizon") ? detail::to_long(details.at("horizon"), "horizon")
                                         : grid.t_max;
    long inc = details.contains("increment")
                   ? detail::to_long(details.at("increment"), "increment")
                   : grid.t_size;
    long total = details.contains("total_periods")
                     ? detail::to_long(details.at("total_periods"), "total_periods")
                     : k;
    if (h != grid.t_max || inc != grid.t_size || total != k || inc * total != h)
      throw AssemblyError("inconsistent period details: horizon " + std::to_string(h) +
                          ", increment " + std::to_string(inc) + ", total_periods " +
                          std::to_string(total) + " do not match " + std::to_string(k) +
                          " periods of " + std::to_string(grid.t_size) + " minutes");
  }

  for (long i = 0; i < k; ++i) {
    long next_start = grid.periods[(i + 1) % k].start % grid.t_max;
    if (grid.periods[i].end % grid.t_max != next_start)
      throw AssemblyError("periods are not contiguous at period " + std::to_string(i + 1));
  }
  return grid;
}

namespace detail {

// hours-per-day per workload type: stated hours win; otherwise the type's
// workload fraction scales the hours of the unit-workload type.
inline std::map<std::string, double> daily_hours_by_type(const ExtractionStore& store) {
  std::map<std::string, double> stated;
  if (store.has("daily working hours")) {
    for (const auto& el : store.at("daily working hours").at("value"))
      stated[el.at("workload_type").get<std::string>()] =
          to_number(el.at("hours_per_day"), "hours_per_day");
  }
  std::map<std::string, double> workload;
  if (store.has("set of workload types")) {
    for (const auto& el : store.at("set of workload types").at("value"))
      workload[el.at("workload_type").get<std::string>()] =
          to_number(el.at("workload"), "workload");
  }
  double unit_hours = 0.0;
  for (const auto& [type, w] : workload)
    if (w == 1.0 && stated.count(type)) unit_hours = stated[type];

  std::map<std::string, double> hours = stated;
  for (const auto& [type, w] : workload)
    if (!hours.count(type) && unit_hours > 0) hours[type] = w * unit_hours;
  return hours;
}

}  // namespace detail

// Builds the shift list. Shift-type shifts come from "set of shifts"
// (start time + duration in minutes); days-off shifts come from the
// workload-specific task when present, falling back to the generic one,
// with hours-per-day resolved per workload type.
inline std::vector<Shift> build_shifts(const ExtractionStore& store, const TimeGrid& grid) {
  std::vector<Shift> shifts;

  if (grid.type == ProblemType::shift_scheduling) {
    if (!store.has("set of shifts")) throw AssemblyError("no 'set of shifts' extraction");
    for (const auto& el : store.at("set of shifts").at("value")) {
      Shift s;
      s.id = static_cast<int>(shifts.size()) + 1;
      s.start = detail::parse_hhmm(el.at("start_time").get<std::string>());
      s.duration = detail::parse_duration_minutes(el.at("duration"));
      if (s.duration <= 0)
        throw AssemblyError("shift " + std::to_string(s.id) + " has non-positive duration");
      shifts.push_back(std::move(s));
    }
    if (shifts.empty()) throw AssemblyError("'set of shifts' lists no shifts");
    return shifts;
  }

  const auto hours = detail::daily_hours_by_type(store);
  auto make_shift = [&](const json& el, const std::string& workload_type) {
    Shift s;
    s.id = static_cast<int>(shifts.size()) + 1;
    s.start = detail::parse_day_index(el.at("start_day")) - 1;
    s.duration = detail::to_long(el.at("duration"), "duration");
    if (s.duration <= 0)
      throw AssemblyError("shift " + std::to_string(s.id) + " has non-positive duration");
    s.workload_type = workload_type;
    auto it = hours.find(workload_type);
    if (it != hours.end()) s.hours_per_day = it->second;
    shifts.push_back(std::move(s));
  };

  if (store.has("set of workload-specific shifts")) {
    for (const auto& group : store.at("set of workload-specific shifts").at("value")) {
      const std::string type = group.at("workload_type").get<std::string>();
      for (const auto& el : group.at("shifts")) make_shift(el, type);
    }
  } else if (store.has("set of shifts")) {
    const json& value = store.at("set of shifts").at("value");
    // The aliased key may carry the workload-specific layout.
    if (!value.empty() && value[0].contains("workload_type")) {
      for (const auto& group : value) {
        const std::string type = group.at("workload_type").get<std::string>();
        for (const auto& el : group.at("shifts")) make_shift(el, type);
      }
    } else {
      for (const auto& el : value) make_shift(el, "");
    }
  } else {
    throw AssemblyError("no shift extraction ('set of shifts' or workload-specific)");
  }
  if (shifts.empty()) throw AssemblyError("shift extraction lists no shifts");
  return shifts;
}

// Merges extracted break windows into the shifts. Windows must lie inside
// the shift and be pairwise disjoint.
inline void apply_breaks(const ExtractionStore& store, std::vector<Shift>& shifts) {
  if (!store.has("set of breaks")) return;
  for (const auto& el : store.at("set of breaks").at("value")) {
    long sid = detail::to_long(el.at("shift_id"), "shift_id");
    if (sid < 1 || sid > static_cast<long>(shifts.size()))
      throw AssemblyError("break references unknown shift " + std::to_string(sid));
    Shift& s = shifts[sid - 1];
    for (const auto& b : el.at("breaks")) {
      long off = detail::parse_duration_minutes(b.at("start_offset"));
      long len = detail::parse_duration_minutes(b.at("duration"));
      if (off < 0 || len <= 0 || off + len > s.duration)
        throw AssemblyError("break window [" + std::to_string(off) + ", " +
                            std::to_string(off + len) + ") outside shift " +
                            std::to_string(sid) + " of duration " + std::to_string(s.duration));
      s.breaks.emplace_back(off, len);
    }
    std::sort(s.breaks.begin(), s.breaks.end());
    for (std::size_t i = 1; i < s.breaks.size(); ++i)
      if (s.breaks[i - 1].first + s.breaks[i - 1].second > s.breaks[i].first)
        throw AssemblyError("overlapping breaks on shift " + std::to_string(sid));
  }
}

inline std::optional<OvertimePolicy> build_overtime_policy(const ExtractionStore& store) {
  if (!store.has("overtime policy")) return std::nullopt;
  const json& v = store.at("overtime policy").at("value");
  OvertimePolicy p;
  p.max_overtime_periods = detail::to_long(v.at("max_overtime_periods"), "max_overtime_periods");
  if (p.max_overtime_periods < 0) throw AssemblyError("negative max_overtime_periods");
  if (v.contains("cost_per_overtime_period") && !v.at("cost_per_overtime_period").is_null())
    p.cost_per_overtime_period =
        detail::to_number(v.at("cost_per_overtime_period"), "cost_per_overtime_period");
  return p;
}

inline std::optional<DemandSpec> build_demand(const ExtractionStore& store,
                                              const TimeGrid& grid) {
  const char* key = nullptr;
  if (store.has("minimum number of employees required for each period"))
    key = "minimum number of employees required for each period";
  else if (store.has("minimum labour demand for each day"))
    key = "minimum labour demand for each day";
  else
    return std::nullopt;

  const json& entry = store.at(key);
  DemandSpec d;
  d.lb.assign(grid.periods.size(), -1.0);
  for (const auto& el : entry.at("value")) {
    long pid = detail::to_long(el.at("period_id"), "period_id");
    if (pid < 1 || pid > static_cast<long>(grid.periods.size()))
      throw AssemblyError("demand references unknown period " + std::to_string(pid));
    const json& amount = el.contains("min_employees") ? el.at("min_employees")
                                                      : el.at("min_demand");
    d.lb[pid - 1] = detail::to_number(amount, "demand");
  }
  for (std::size_t t = 0; t < d.lb.size(); ++t)
    if (d.lb[t] < 0)
      throw AssemblyError("no demand extracted for period " + std::to_string(t + 1));
  const json details = entry.value("details", json::object());
  if (details.contains("unit")) {
    std::string unit = details.at("unit").get<std::string>();
    d.hours = (unit == "hours" || unit == "labour hours" || unit == "hour");
  }
  return d;
}

// Per-shift costs. Days-off: weekly costs per workload type plus a weekend
// bonus for every worked weekend day, where work days come from the
// coverage row and are never extracted. Shift type: direct per-shift costs,
// or per-period costs summed over the periods the shift works.
inline std::optional<std::vector<double>> derive_costs(
    const ExtractionStore& store, const TimeGrid& grid, const std::vector<Shift>& shifts,
    const std::vector<std::vector<int>>& coverage) {
  std::vector<double> c(shifts.size(), 0.0);
  bool any = false;

  if (grid.type == ProblemType::days_off_scheduling) {
    if (store.has("weekly cost per workload type")) {
      std::map<std::string, double> by_type;
      for (const auto& el : store.at("weekly cost per workload type").at("value"))
        by_type[el.at("workload_type").get<std::string>()] =
            detail::to_number(el.at("weekly_cost"), "weekly_cost");
      for (std::size_t s = 0; s < shifts.size(); ++s) {
        auto it = by_type.find(shifts[s].workload_type);
        if (it == by_type.end())
          throw AssemblyError("no weekly cost for workload type '" + shifts[s].workload_type +
                              "'");
        c[s] = it->second;
      }
      any = true;
    }
    if (store.has("weekend bonus")) {
      const json& v = store.at("weekend bonus").at("value");
      double bonus = detail::to_number(v.at("bonus_per_day"), "bonus_per_day");
      std::vector<long> weekend_ids;
      for (const auto& d : v.at("weekend_days"))
        weekend_ids.push_back(detail::to_long(d.at("period_id"), "period_id"));
      for (std::size_t s = 0; s < shifts.size(); ++s) {
        int worked = 0;
        for (long pid : weekend_ids) {
          if (pid < 1 || pid > static_cast<long>(grid.periods.size()))
            throw AssemblyError("weekend day references unknown period " + std::to_string(pid));
          worked += coverage[pid - 1][s];
        }
        c[s] += bonus * worked;
      }
      any = true;
    }
    return any ? std::optional(c) : std::nullopt;
  }

  if (store.has("costs of shifts")) {
    const json& value = store.at("costs of shifts").at("value");
    if (!value.empty() && value[0].contains("period_id")) {
      // Aliased per-period costs: the shift cost is the sum of the regular
      // costs of the periods it works.
      std::vector<double> period_cost(grid.periods.size(), 0.0);
      for (const auto& el : value) {
        long pid = detail::to_long(el.at("period_id"), "period_id");
        if (pid < 1 || pid > static_cast<long>(grid.periods.size()))
          throw AssemblyError("period cost references unknown period " + std::to_string(pid));
        period_cost[pid - 1] = detail::to_number(el.at("regular_cost"), "regular_cost");
      }
      for (std::size_t s = 0; s < shifts.size(); ++s)
        for (std::size_t t = 0; t < grid.periods.size(); ++t)
          c[s] += coverage[t][s] * period_cost[t];
      return c;
    }
    for (const auto& el : value) {
      long sid = detail::to_long(el.at("shift_id"), "shift_id");
      if (sid < 1 || sid > static_cast<long>(shifts.size()))
        throw AssemblyError("shift cost references unknown shift " + std::to_string(sid));
      c[sid - 1] = detail::to_number(el.at("cost"), "cost");
    }
    return c;
  }
  return std::nullopt;
}

namespace detail {

inline std::string sanitize_name(std::string s) {
  for (auto& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

inline void set_provenance(ModelIR& m, const ModellingGraph& g, const std::string& component,
                           const std::string& node_name) {
  if (const GraphNode* n = g.node_by_name(node_name)) m.provenance[component] = n->id;
}

}  // namespace detail

// Instantiates the full model from the extraction store and the activation
// report. Optional constraints whose extraction failed are omitted with a
// warning; missing backbone information is an assembly error naming the
// graph node it serves.
inline ModelIR build_model(const ExtractionStore& store, const ActivationReport& report,
                           const ModellingGraph& graph,
                           std::vector<std::string>* warnings = nullptr) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  const TimeGrid grid = build_periods(store, graph.problem_type);
  std::vector<Shift> shifts = build_shifts(store, grid);
  apply_breaks(store, shifts);
  const auto a = coverage_matrix(grid, shifts);

  const auto demand = build_demand(store, grid);
  if (!demand)
    throw AssemblyError(
        "no demand extraction for activated node 'Labour demand satisfaction' "
        "('Minimum labour demand per period')");

  std::optional<OvertimePolicy> policy = build_overtime_policy(store);
  if (report.activated_nodes.count("Overtimes") && !policy)
    warn("overtime node activated but the overtime policy extraction returned no information; "
         "overtime omitted from the model");
  const bool overtime = policy && policy->max_overtime_periods > 0;

  const auto costs = derive_costs(store, grid, shifts, a);
  const bool cost_objective = report.activated_nodes.count("Minimise total cost") > 0;
  if (cost_objective && !costs)
    throw AssemblyError("cost objective detected but no cost information was extracted");
  if (!cost_objective && !report.activated_nodes.count("Minimise total employees"))
    warn("no objective node activated; defaulting to minimising total employees");

  // Demand weights: heads by default, hours-per-day for hour-unit demand.
  std::vector<double> w(shifts.size(), 1.0);
  if (demand->hours) {
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      if (shifts[s].hours_per_day <= 0)
        throw AssemblyError("hour-based demand but shift " + std::to_string(s + 1) +
                            " has no daily working hours");
      w[s] = shifts[s].hours_per_day;
    }
  }

  ModelIR m;
  const std::size_t nt = grid.periods.size();
  const std::size_t ns = shifts.size();

  // Sets.
  {
    IndexSet T{"T", grid.type == ProblemType::days_off_scheduling ? "set of days" :
                                                                    "set of periods", {}};
    for (const auto& p : grid.periods) T.elements.push_back(std::to_string(p.id));
    m.sets.push_back(std::move(T));
    IndexSet S{"S", "set of shifts", {}};
    for (const auto& s : shifts) S.elements.push_back(std::to_string(s.id));
    m.sets.push_back(std::move(S));
    if (overtime) {
      IndexSet O{"O", "overtime extensions, in periods", {}};
      for (long o = 0; o <= policy->max_overtime_periods; ++o)
        O.elements.push_back(std::to_string(o));
      m.sets.push_back(std::move(O));
    }
  }

  // Parameters: everything the constraints and objective use, fully numeric.
  {
    ModelParam start{"start", "start of each shift", {ns}, {}};
    ModelParam dur{"duration", "duration of each shift", {ns}, {}};
    for (const auto& s : shifts) {
      start.values.push_back(static_cast<double>(s.start));
      dur.values.push_back(static_cast<double>(s.duration));
    }
    m.params.push_back(std::move(start));
    m.params.push_back(std::move(dur));

    ModelParam lb{"lb", demand->hours ? "minimum labour hours required in each period"
                                      : "minimum number of employees required in each period",
                  {nt}, demand->lb};
    m.params.push_back(std::move(lb));

    ModelParam am{"a", "1 if shift s works during period t", {nt, ns}, {}};
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t s = 0; s < ns; ++s) am.values.push_back(a[t][s]);
    m.params.push_back(std::move(am));

    if (demand->hours) {
      ModelParam h{"h", "working hours contributed per covered period", {ns}, w};
      m.params.push_back(std::move(h));
    }
    if (costs) {
      ModelParam c{"c", "cost of assigning one employee to shift s", {ns}, *costs};
      m.params.push_back(std::move(c));
    }
  }

  // Decision variables.
  for (const auto& s : shifts) {
    ModelVariable x;
    x.name = "x_" + std::to_string(s.id);
    x.domain = VarDomain::nonneg_integer;
    x.description = "employees assigned to shift " + std::to_string(s.id) +
                    (s.workload_type.empty() ? "" : " (" + s.workload_type + ")");
    m.vars.push_back(std::move(x));
  }

  std::vector<std::vector<std::vector<int>>> v;
  if (overtime) {
    v = overtime_coverage(grid, shifts, *policy);
    ModelParam vp{"v", "1 if shift s extended by o overtime periods works during period t",
                  {nt, static_cast<std::size_t>(policy->max_overtime_periods) + 1, ns}, {}};
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t o = 0; o < vp.shape[1]; ++o)
        for (std::size_t s = 0; s < ns; ++s) vp.values.push_back(v[t][o][s]);
    m.params.push_back(std::move(vp));
    for (const auto& s : shifts) {
      for (long o = 0; o <= policy->max_overtime_periods; ++o) {
        ModelVariable y;
        y.name = "y_" + std::to_string(s.id) + "_" + std::to_string(o);
        y.domain = VarDomain::nonneg_integer;
        y.description = "employees on shift " + std::to_string(s.id) + " working " +
                        std::to_string(o) + " overtime periods";
        m.vars.push_back(std::move(y));
      }
    }
  }

  // Demand coverage: with overtime the covering terms run over the extended
  // variables; otherwise directly over x.
  for (std::size_t t = 0; t < nt; ++t) {
    ModelConstraint con;
    con.label = "demand_" + std::to_string(t + 1);
    con.sense = ConstraintSense::ge;
    con.rhs = demand->lb[t];
    if (overtime) {
      for (std::size_t s = 0; s < ns; ++s)
        for (long o = 0; o <= policy->max_overtime_periods; ++o)
          if (v[t][o][s])
            con.terms.push_back({w[s], "y_" + std::to_string(s + 1) + "_" + std::to_string(o)});
    } else {
      for (std::size_t s = 0; s < ns; ++s)
        if (a[t][s]) con.terms.push_back({w[s], "x_" + std::to_string(s + 1)});
    }
    m.constraints.push_back(std::move(con));
  }
  detail::set_provenance(m, graph, "demand", "Labour demand satisfaction");

  if (overtime) {
    for (std::size_t s = 0; s < ns; ++s) {
      ModelConstraint link;
      link.label = "link_" + std::to_string(s + 1);
      link.sense = ConstraintSense::eq;
      link.rhs = 0.0;
      link.terms.push_back({1.0, "x_" + std::to_string(s + 1)});
      for (long o = 0; o <= policy->max_overtime_periods; ++o)
        link.terms.push_back({-1.0, "y_" + std::to_string(s + 1) + "_" + std::to_string(o)});
      m.constraints.push_back(std::move(link));
    }
    detail::set_provenance(m, graph, "overtime", "Overtimes");
  }

  // Optional constraints, presence-driven with activation-driven warnings.
  if (store.has("maximum employees per workload type")) {
    for (const auto& el : store.at("maximum employees per workload type").at("value")) {
      const std::string type = el.at("workload_type").get<std::string>();
      const double cap = detail::to_number(el.at("max_employees"), "max_employees");
      ModelConstraint con;
      con.label = "cap_" + detail::sanitize_name(type);
      con.sense = ConstraintSense::le;
      con.rhs = cap;
      for (const auto& s : shifts)
        if (s.workload_type == type) con.terms.push_back({1.0, "x_" + std::to_string(s.id)});
      if (con.terms.empty()) {
        warn("cap on workload type '" + type + "' matches no shift; constraint skipped");
        continue;
      }
      ModelParam capP{"cap_" + detail::sanitize_name(type),
                      "maximum employees of workload type " + type, {}, {cap}};
      m.params.push_back(std::move(capP));
      m.constraints.push_back(std::move(con));
      detail::set_provenance(m, graph, "cap", "Part-time employee cap");
    }
  } else if (report.activated_nodes.count("Part-time employee cap")) {
    warn("constraint omitted: extraction returned no information for node "
         "'Part-time employee cap'");
  }

  if (store.has("total workforce size")) {
    const double total = detail::to_number(
        store.at("total workforce size").at("value").at("total_employees"), "total_employees");
    ModelConstraint con;
    con.label = "total_workforce";
    con.sense = ConstraintSense::eq;
    con.rhs = total;
    for (const auto& s : shifts) con.terms.push_back({1.0, "x_" + std::to_string(s.id)});
    m.params.push_back({"N", "total number of employees to assign", {}, {total}});
    m.constraints.push_back(std::move(con));
    detail::set_provenance(m, graph, "total_workforce", "Total workforce equality");
  } else if (report.activated_nodes.count("Total workforce equality")) {
    warn("constraint omitted: extraction returned no information for node "
         "'Total workforce equality'");
  }

  if (store.has("weekend-off requirement")) {
    const json& val = store.at("weekend-off requirement").at("value");
    const double rho = detail::parse_fraction(val.at("ratio"));
    std::vector<long> off_ids;
    for (const auto& d : val.at("off_days"))
      off_ids.push_back(detail::to_long(d.at("period_id"), "period_id"));
    // Off = shifts resting on all of the stated days, computed by rule from
    // the coverage matrix.
    std::set<int> off_shifts;
    for (std::size_t s = 0; s < ns; ++s) {
      bool rests = true;
      for (long pid : off_ids) {
        if (pid < 1 || pid > static_cast<long>(nt))
          throw AssemblyError("weekend-off day references unknown period " +
                              std::to_string(pid));
        if (a[pid - 1][s]) rests = false;
      }
      if (rests) off_shifts.insert(static_cast<int>(s) + 1);
    }
    ModelConstraint con;
    con.label = "weekend_off_ratio";
    con.sense = ConstraintSense::ge;
    con.rhs = 0.0;
    for (const auto& s : shifts)
      con.terms.push_back({off_shifts.count(s.id) ? 1.0 - rho : -rho,
                           "x_" + std::to_string(s.id)});
    m.params.push_back({"rho", "required fraction of employees with the day set off", {}, {rho}});
    m.constraints.push_back(std::move(con));
    detail::set_provenance(m, graph, "weekend_off_ratio", "Weekend-off ratio");
  } else if (report.activated_nodes.count("Weekend-off ratio")) {
    warn("constraint omitted: extraction returned no information for node 'Weekend-off ratio'");
  }

  // Objective.
  m.objective.minimize = true;
  if (cost_objective) {
    for (std::size_t s = 0; s < ns; ++s)
      m.objective.terms.push_back({(*costs)[s], "x_" + std::to_string(s + 1)});
    if (overtime && policy->cost_per_overtime_period) {
      for (std::size_t s = 0; s < ns; ++s)
        for (long o = 1; o <= policy->max_overtime_periods; ++o)
          m.objective.terms.push_back(
              {static_cast<double>(o) * *policy->cost_per_overtime_period,
               "y_" + std::to_string(s + 1) + "_" + std::to_string(o)});
    }
    detail::set_provenance(m, graph, "objective", "Minimise total cost");
  } else {
    for (std::size_t s = 0; s < ns; ++s)
      m.objective.terms.push_back({1.0, "x_" + std::to_string(s + 1)});
    detail::set_provenance(m, graph, "objective", "Minimise total employees");
  }
  detail::set_provenance(m, graph, "periods", "Periods");
  detail::set_provenance(m, graph, "shifts", "Shifts");
  detail::set_provenance(m, graph, "coverage", "Shift coverage of periods");
  detail::set_provenance(m, graph, "variables", "Number of employees per shift");

  std::vector<std::string> problems = m.validate();
  if (!problems.empty()) {
    std::string msg = "assembled model failed validation:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw AssemblyError(msg);
  }
  return m;
}

namespace detail {

inline std::string latex_var(const std::string& name) {
  // x_3 -> x_{3}; y_3_1 -> y_{3,1}
  std::size_t us = name.find('_');
  if (us == std::string::npos) return name;
  std::string base = name.substr(0, us);
  std::string rest = name.substr(us + 1);
  for (auto& c : rest)
    if (c == '_') c = ',';
  return base + "_{" + rest + "}";
}

inline std::string latex_terms(const std::vector<LinearTerm>& terms) {
  std::string out;
  bool first = true;
  for (const auto& t : terms) {
    double c = t.coef;
    if (c == 0) continue;
    std::string sign;
    if (first) {
      sign = c < 0 ? "-" : "";
    } else {
      sign = c < 0 ? " - " : " + ";
    }
    double mag = c < 0 ? -c : c;
    std::string coef = (mag == 1.0) ? "" : fmt_num(mag) + " ";
    out += sign + coef + latex_var(t.var);
    first = false;
  }
  if (out.empty()) out = "0";
  return out;
}

inline std::string latex_escape_label(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_') out += "\\_";
    else out += c;
  }
  return out;
}

}  // namespace detail

// The complete model in LaTeX: sets, parameters, and decision variables
// first, then the objective function and the constraints. Every parameter is
// printed with its values; constraints carry explicit numeric coefficients.
inline std::string render_latex(const ModelIR& m) {
  using detail::fmt_num;
  std::string out;
  out += "% MILP model";
  if (!m.problem_id.empty()) out += " for instance " + m.problem_id;
  out += "\n";

  out += "\\section*{Sets}\n\\begin{itemize}\n";
  for (const auto& s : m.sets) {
    out += "  \\item $" + s.name + " = \\{";
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
      if (i) out += ", ";
      out += s.elements[i];
    }
    out += "\\}$ --- " + s.description + ".\n";
  }
  out += "\\end{itemize}\n\n";

  out += "\\section*{Parameters}\n\\begin{itemize}\n";
  for (const auto& p : m.params) {
    if (p.shape.empty()) {
      out += "  \\item $" + p.name + " = " + fmt_num(p.values[0]) + "$ --- " + p.description +
             ".\n";
    } else if (p.shape.size() == 1) {
      out += "  \\item $" + p.name + " = (";
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (i) out += ", ";
        out += fmt_num(p.values[i]);
      }
      out += ")$ --- " + p.description + ".\n";
    } else if (p.shape.size() == 2) {
      out += "  \\item $" + p.name + "_{t,s}$ --- " + p.description + ":\n";
      out += "  \\[ " + p.name + " = \\begin{pmatrix}\n";
      for (std::size_t t = 0; t < p.shape[0]; ++t) {
        out += "    ";
        for (std::size_t s = 0; s < p.shape[1]; ++s) {
          if (s) out += " & ";
          out += fmt_num(p.values[t * p.shape[1] + s]);
        }
        out += " \\\\\n";
      }
      out += "  \\end{pmatrix} \\]\n";
    } else {
      // Rank-3 tensors are printed one slice per middle index.
      out += "  \\item $" + p.name + "_{t,o,s}$ --- " + p.description + ":\n";
      for (std::size_t o = 0; o < p.shape[1]; ++o) {
        out += "  \\[ " + p.name + "_{\\cdot," + std::to_string(o) +
               ",\\cdot} = \\begin{pmatrix}\n";
        for (std::size_t t = 0; t < p.shape[0]; ++t) {
          out += "    ";
          for (std::size_t s = 0; s < p.shape[2]; ++s) {
            if (s) out += " & ";
            out += fmt_num(p.values[(t * p.shape[1] + o) * p.shape[2] + s]);
          }
          out += " \\\\\n";
        }
        out += "  \\end{pmatrix} \\]\n";
      }
    }
  }
  out += "\\end{itemize}\n\n";

  out += "\\section*{Decision Variables}\n\\begin{itemize}\n";
  // Group flat variables into families by name prefix.
  std::vector<std::pair<std::string, const ModelVariable*>> families;
  for (const auto& v : m.vars) {
    std::string family = v.name.substr(0, v.name.find('_'));
    bool seen = false;
    for (const auto& [f, _] : families) seen = seen || f == family;
    if (!seen) families.emplace_back(family, &v);
  }
  for (const auto& [family, v] : families) {
    std::string domain = v->domain == VarDomain::nonneg_continuous
                             ? "\\mathbb{R}_{\\geq 0}"
                             : (v->domain == VarDomain::binary ? "\\{0,1\\}"
                                                               : "\\mathbb{Z}_{\\geq 0}");
    if (family == "x") {
      out += "  \\item $x_{s} \\in " + domain + "$ for every $s \\in S$ --- number of "
             "employees assigned to shift $s$.\n";
    } else if (family == "y") {
      out += "  \\item $y_{s,o} \\in " + domain + "$ for every $s \\in S$, $o \\in O$ --- "
             "number of employees on shift $s$ working $o$ overtime periods.\n";
    } else {
      out += "  \\item $" + family + " \\in " + domain + "$ --- " + v->description + ".\n";
    }
  }
  out += "\\end{itemize}\n\n";

  out += "\\section*{Objective Function}\n\\begin{align*}\n";
  out += std::string("  \\") + (m.objective.minimize ? "min" : "max") + "\\; & " +
         detail::latex_terms(m.objective.terms) + "\n";
  out += "\\end{align*}\n\n";

  out += "\\section*{Constraints}\n\\begin{align*}\n";
  for (const auto& c : m.constraints) {
    const char* rel = c.sense == ConstraintSense::le
                          ? "\\leq"
                          : (c.sense == ConstraintSense::eq ? "=" : "\\geq");
    out += "  " + detail::latex_terms(c.terms) + " &" + rel + " " + fmt_num(c.rhs) +
           " && \\text{(" + detail::latex_escape_label(c.label) + ")} \\\\\n";
  }
  out += "\\end{align*}\n";
  return out;
}

namespace detail {

inline std::string lp_terms(const std::vector<LinearTerm>& terms) {
  std::string out;
  bool first = true;
  for (const auto& t : terms) {
    if (t.coef == 0) continue;
    double mag = t.coef < 0 ? -t.coef : t.coef;
    if (first) {
      out += (t.coef < 0 ? "- " : "");
      first = false;
    } else {
      out += (t.coef < 0 ? " - " : " + ");
    }
    out += fmt_num(mag) + " " + t.var;
  }
  return out;
}

}  // namespace detail

// CPLEX-style LP text: objective, Subject To, integer sections, End. All
// variables are nonnegative by default so no Bounds section is emitted.
inline std::string render_lp(const ModelIR& m) {
  std::string out;
  out += "\\ LP model";
  if (!m.problem_id.empty()) out += " for instance " + m.problem_id;
  out += "\n";
  out += m.objective.minimize ? "Minimize\n" : "Maximize\n";
  std::string obj = detail::lp_terms(m.objective.terms);
  if (obj.empty()) obj = "0 " + (m.vars.empty() ? std::string("x") : m.vars[0].name);
  out += " obj: " + obj + "\n";
  out += "Subject To\n";
  for (const auto& c : m.constraints) {
    std::string terms = detail::lp_terms(c.terms);
    if (terms.empty()) terms = "0 " + m.vars[0].name;
    out += " " + c.label + ": " + terms + " " + to_string(c.sense) + " " +
           detail::fmt_num(c.rhs) + "\n";
  }
  std::string generals, binaries;
  for (const auto& v : m.vars) {
    if (v.domain == VarDomain::nonneg_integer) generals += " " + v.name;
    if (v.domain == VarDomain::binary) binaries += " " + v.name;
  }
  if (!generals.empty()) out += "Generals\n" + generals + "\n";
  if (!binaries.empty()) out += "Binaries\n" + binaries + "\n";
  out += "End\n";
  return out;
}

}  // namespace schedmilp
