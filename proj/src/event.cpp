#include "adamine/event.hpp"

#include <algorithm>
#include <tuple>

#include "adamine/errors.hpp"

namespace adamine {

namespace {

bool clean_text(const std::string& s) {
  return s.find('\t') == std::string::npos &&
         s.find('\n') == std::string::npos &&
         s.find('\r') == std::string::npos;
}

}  // namespace

void validate_event(const EventRecord& e, size_t row) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("event row " + std::to_string(row) + ": " + what);
  };
  if (!(e.begin_time < e.end_time)) fail("begin_time must precede end_time");
  if (!(e.f_lo_hz < e.f_hi_hz)) fail("f_lo must be below f_hi");
  if (!(e.score >= 0.0 && e.score <= 1.0)) fail("score outside [0, 1]");
  for (const std::string* s :
       {&e.event_id, &e.run_id, &e.channel_id, &e.detector_id, &e.tag})
    if (!clean_text(*s)) fail("text field contains tab or newline");
}

void validate_events(const std::vector<EventRecord>& events) {
  for (size_t i = 0; i < events.size(); ++i) validate_event(events[i], i + 1);
}

bool canonical_event_less(const EventRecord& a, const EventRecord& b) {
  return std::tie(a.begin_time, a.channel_id, a.detector_id, a.end_time,
                  a.f_lo_hz, a.f_hi_hz, a.score, a.tag, a.event_id) <
         std::tie(b.begin_time, b.channel_id, b.detector_id, b.end_time,
                  b.f_lo_hz, b.f_hi_hz, b.score, b.tag, b.event_id);
}

double event_iou(const EventRecord& a, const EventRecord& b) {
  double t_lo = std::max<double>(a.begin_time, b.begin_time) / 1000.0;
  double t_hi = std::min<double>(a.end_time, b.end_time) / 1000.0;
  double f_lo = std::max(a.f_lo_hz, b.f_lo_hz);
  double f_hi = std::min(a.f_hi_hz, b.f_hi_hz);
  if (t_hi <= t_lo || f_hi <= f_lo) return 0.0;
  double inter = (t_hi - t_lo) * (f_hi - f_lo);
  auto area = [](const EventRecord& e) {
    return (e.end_time - e.begin_time) / 1000.0 * (e.f_hi_hz - e.f_lo_hz);
  };
  double uni = area(a) + area(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace adamine
