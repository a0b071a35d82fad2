#ifndef ADAMINE_EVENT_HPP
#define ADAMINE_EVENT_HPP

#include <string>
#include <vector>

#include "adamine/time.hpp"

namespace adamine {

// One finalized detection event. The shared currency between detectors,
// the scheduler and the stores.
struct EventRecord {
  std::string event_id;    // "run_id:counter", assigned by the scheduler
  std::string run_id;
  std::string channel_id;
  UtcMillis begin_time = 0;
  UtcMillis end_time = 0;
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  double score = 0.0;  // [0, 1]
  std::string detector_id;
  std::string tag;  // free-text species / signal label

  bool operator==(const EventRecord&) const = default;
};

// Throws ValidationError naming the 1-based row when the record breaks an
// invariant (begin < end, f_lo < f_hi, score in [0,1], no tabs or newlines
// in text fields).
void validate_event(const EventRecord& e, size_t row);

void validate_events(const std::vector<EventRecord>& events);

// Canonical global order: (begin_time, channel, detector), then the
// remaining fields for a total deterministic order.
bool canonical_event_less(const EventRecord& a, const EventRecord& b);

// Time-frequency intersection-over-union of the two bounding boxes.
double event_iou(const EventRecord& a, const EventRecord& b);

}  // namespace adamine

#endif  // ADAMINE_EVENT_HPP
