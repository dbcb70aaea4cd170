#include "kwstega/envelope.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "kwstega/error.hpp"

namespace kwstega {

std::string serialize_envelope(const Envelope& e) {
  nlohmann::ordered_json doc;
  doc["version"] = e.version;
  doc["seq"] = e.sequence;
  doc["time"] = e.timecode.to_string();
  nlohmann::ordered_json stamps;
  for (auto role : kKeywordRoles) stamps[std::string(to_string(role))] = stamp_hex(role, e.stamps[role]);
  doc["stamps"] = std::move(stamps);
  doc["fingerprint"] = e.fingerprint;
  doc["theme"] = e.theme;
  doc["text"] = e.stego_text;
  try {
    return doc.dump();
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::SchemaError, std::string("envelope text is not valid UTF-8: ") + ex.what());
  }
}

Envelope parse_envelope(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::SchemaError, std::string("envelope record is not valid JSON: ") + ex.what());
  }
  if (!doc.is_object()) fail(ErrorCode::SchemaError, "envelope record is not an object");
  Envelope e;
  try {
    e.version = doc.at("version").get<int>();
    if (e.version != kEnvelopeVersion) fail(ErrorCode::VersionUnsupported, "envelope version " + std::to_string(e.version));
    auto seq = doc.at("seq").get<std::int64_t>();
    if (seq < 0 || seq > static_cast<std::int64_t>(UINT32_MAX)) fail(ErrorCode::SchemaError, "seq out of range");
    e.sequence = static_cast<std::uint32_t>(seq);
    try {
      e.timecode = TimeCode::parse(doc.at("time").get<std::string>());
    } catch (const Error& ex) {
      fail(ErrorCode::SchemaError, ex.what());
    }
    const auto& stamps = doc.at("stamps");
    if (!stamps.is_object() || stamps.size() != 4) fail(ErrorCode::SchemaError, "stamps must have four roles");
    for (auto role : kKeywordRoles) {
      e.stamps[role] = parse_stamp_hex(role, stamps.at(std::string(to_string(role))).get<std::string>());
    }
    e.fingerprint = doc.at("fingerprint").get<std::string>();
    e.theme = doc.at("theme").get<std::string>();
    e.stego_text = doc.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::SchemaError, std::string("envelope field: ") + ex.what());
  }
  return e;
}

void write_envelopes(std::span<const Envelope> envelopes, std::ostream& out) {
  for (const auto& e : envelopes) out << serialize_envelope(e) << '\n';
}

std::vector<Envelope> read_envelopes(std::istream& in) {
  std::vector<Envelope> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(parse_envelope(line));
    } catch (const Error& ex) {
      throw Error(ex.code(), std::string(ex.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return out;
}

void write_envelopes(std::span<const Envelope> envelopes, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + destination.string());
  write_envelopes(envelopes, out);
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed for " + destination.string());
}

std::vector<Envelope> read_envelopes(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + source.string());
  return read_envelopes(in);
}

}  // namespace kwstega
