#include "outcry/midi.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

namespace outcry::midi {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void put_varlen(std::string& out, std::uint32_t v) {
  if (v > 0x0FFFFFFF) throw MidiError("delta time too large");
  std::array<char, 4> buf{};
  int n = 0;
  buf[n++] = static_cast<char>(v & 0x7F);
  while ((v >>= 7) != 0) buf[n++] = static_cast<char>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

void put_chunk(std::string& out, const char* tag, const std::string& body) {
  out.append(tag, 4);
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out += body;
}

void put_meta(std::string& body, std::uint8_t type, const std::string& data) {
  body.push_back(static_cast<char>(0xFF));
  body.push_back(static_cast<char>(type));
  put_varlen(body, static_cast<std::uint32_t>(data.size()));
  body += data;
}

struct RawEvent {
  std::uint32_t tick;
  int order;  // 0 = note off, 1 = note on
  std::uint8_t status;
  std::uint8_t data1;
  std::uint8_t data2;
};

std::string track_body(const Track& track, bool tempo_track, std::uint32_t tempo) {
  std::string body;
  if (!track.name.empty()) {
    put_varlen(body, 0);
    put_meta(body, 0x03, track.name);
  }
  if (tempo_track) {
    put_varlen(body, 0);
    std::string t;
    t.push_back(static_cast<char>((tempo >> 16) & 0xFF));
    t.push_back(static_cast<char>((tempo >> 8) & 0xFF));
    t.push_back(static_cast<char>(tempo & 0xFF));
    put_meta(body, 0x51, t);
    put_varlen(body, 0);
    put_meta(body, 0x58, std::string{4, 2, 24, 8});
  }

  std::vector<RawEvent> events;
  events.reserve(track.notes.size() * 2);
  for (const auto& n : track.notes) {
    if (n.duration == 0) throw MidiError("note with zero duration");
    if (n.channel > 15 || n.pitch > 127 || n.velocity == 0 || n.velocity > 127) {
      throw MidiError("note field out of range");
    }
    events.push_back({n.start, 1, static_cast<std::uint8_t>(0x90 | n.channel), n.pitch, n.velocity});
    events.push_back({n.start + n.duration, 0, static_cast<std::uint8_t>(0x80 | n.channel), n.pitch, 0});
  }
  std::stable_sort(events.begin(), events.end(), [](const RawEvent& a, const RawEvent& b) {
    return std::tie(a.tick, a.order) < std::tie(b.tick, b.order);
  });

  std::uint32_t now = 0;
  for (const auto& e : events) {
    put_varlen(body, e.tick - now);
    now = e.tick;
    body.push_back(static_cast<char>(e.status));
    body.push_back(static_cast<char>(e.data1));
    body.push_back(static_cast<char>(e.data2));
  }
  put_varlen(body, 0);
  put_meta(body, 0x2F, "");
  return body;
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  bool done() const { return pos_ >= data_.size(); }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16() {
    const auto hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t varlen() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const auto b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    throw MidiError("variable-length quantity longer than 4 bytes");
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw MidiError("unexpected end of MIDI data");
  }

  std::string data_;
  std::size_t pos_ = 0;
};

Track parse_track(const std::string& chunk, std::optional<std::uint32_t>& tempo) {
  Reader r(chunk);
  Track track;
  std::map<std::pair<int, int>, std::vector<std::pair<std::uint32_t, std::uint8_t>>> open;
  std::uint32_t now = 0;
  std::uint8_t running = 0;
  bool ended = false;
  while (!r.done()) {
    if (ended) throw MidiError("data after end-of-track");
    now += r.varlen();
    std::uint8_t status = r.u8();
    std::uint8_t first = 0;
    bool have_first = false;
    if (status < 0x80) {
      if (running == 0) throw MidiError("running status without a prior status byte");
      first = status;
      have_first = true;
      status = running;
    }
    if (status == 0xFF) {
      const auto type = r.u8();
      const auto len = r.varlen();
      const std::string data = r.bytes(len);
      if (type == 0x03 && track.name.empty()) track.name = data;
      if (type == 0x51 && len == 3 && !tempo) {
        tempo = (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[0])) << 16) |
                (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[1])) << 8) |
                static_cast<std::uint8_t>(data[2]);
      }
      if (type == 0x2F) ended = true;
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      r.bytes(r.varlen());
      continue;
    }
    running = status;
    const int kind = status & 0xF0;
    const int channel = status & 0x0F;
    const std::uint8_t d1 = have_first ? first : r.u8();
    const bool two_bytes = kind != 0xC0 && kind != 0xD0;
    const std::uint8_t d2 = two_bytes ? r.u8() : 0;
    if (kind == 0x90 && d2 > 0) {
      open[{channel, d1}].emplace_back(now, d2);
    } else if (kind == 0x80 || (kind == 0x90 && d2 == 0)) {
      auto it = open.find({channel, d1});
      if (it == open.end() || it->second.empty()) throw MidiError("note-off without matching note-on");
      const auto [start, velocity] = it->second.front();
      it->second.erase(it->second.begin());
      track.notes.push_back({start, now - start, static_cast<std::uint8_t>(channel), d1, velocity});
    }
  }
  if (!ended) throw MidiError("track missing end-of-track event");
  for (const auto& [key, starts] : open) {
    if (!starts.empty()) throw MidiError("note-on without matching note-off");
  }
  std::sort(track.notes.begin(), track.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    return std::tie(a.start, a.pitch, a.channel) < std::tie(b.start, b.pitch, b.channel);
  });
  return track;
}

}  // namespace

void write(const File& file, std::ostream& out) {
  std::string bytes;
  std::string header;
  put_u16(header, file.format);
  put_u16(header, static_cast<std::uint16_t>(file.tracks.size()));
  put_u16(header, file.ticks_per_quarter);
  put_chunk(bytes, "MThd", header);
  for (std::size_t i = 0; i < file.tracks.size(); ++i) {
    put_chunk(bytes, "MTrk", track_body(file.tracks[i], i == 0, file.microseconds_per_quarter));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_file(const File& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MidiError("cannot write MIDI file '" + path + "'");
  write(file, out);
  out.flush();
  if (!out) throw MidiError("failed writing MIDI file '" + path + "'");
}

File read(std::istream& in) {
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  if (r.bytes(4) != "MThd") throw MidiError("missing MThd header");
  const auto header_len = r.u32();
  if (header_len < 6) throw MidiError("short MThd header");
  File file;
  file.format = r.u16();
  const auto ntracks = r.u16();
  file.ticks_per_quarter = r.u16();
  if (file.ticks_per_quarter & 0x8000) throw MidiError("SMPTE time division not supported");
  r.bytes(header_len - 6);
  std::optional<std::uint32_t> tempo;
  for (std::uint16_t t = 0; t < ntracks; ++t) {
    if (r.bytes(4) != "MTrk") throw MidiError("missing MTrk chunk");
    const auto len = r.u32();
    file.tracks.push_back(parse_track(r.bytes(len), tempo));
  }
  file.microseconds_per_quarter = tempo.value_or(500000);
  return file;
}

File read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MidiError("cannot open MIDI file '" + path + "'");
  return read(in);
}

}  // namespace outcry::midi
