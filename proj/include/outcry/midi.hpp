// Minimal Standard MIDI File support: format 1 writer plus a reader used to
// verify written files.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace outcry::midi {

class MidiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoteEvent {
  std::uint32_t start = 0;     // absolute tick
  std::uint32_t duration = 0;  // ticks, > 0
  std::uint8_t channel = 0;
  std::uint8_t pitch = 60;
  std::uint8_t velocity = 90;

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct Track {
  std::string name;
  std::vector<NoteEvent> notes;

  friend bool operator==(const Track&, const Track&) = default;
};

struct File {
  std::uint16_t format = 1;
  std::uint16_t ticks_per_quarter = 480;
  std::uint32_t microseconds_per_quarter = 500000;  // first tempo event, 120 bpm
  std::vector<Track> tracks;  // tracks[0] is the tempo track

  friend bool operator==(const File&, const File&) = default;
};

/// Note-offs sort before note-ons that share a tick.
void write(const File& file, std::ostream& out);
void write_file(const File& file, const std::string& path);

/// Pairs note-on/note-off (velocity-0 note-ons count as offs); handles running
/// status, meta and sysex events. Notes come back sorted by (start, pitch).
File read(std::istream& in);
File read_file(const std::string& path);

}  // namespace outcry::midi
