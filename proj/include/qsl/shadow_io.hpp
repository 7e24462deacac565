// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsl/common.hpp"
#include "qsl/shadows.hpp"

namespace qsl {

// --- checksums and encodings ------------------------------------------------

/// CRC-64/XZ (reflected, poly 0xC96C5795D7870F42, init/xorout all-ones).
inline std::uint64_t crc64(const void* data, std::size_t size) {
  static const auto table = [] {
    std::array<std::uint64_t, 256> t{};
    for (std::uint64_t i = 0; i < 256; ++i) {
      std::uint64_t c = i;
      for (int bit = 0; bit < 8; ++bit)
        c = (c & 1) ? (0xC96C5795D7870F42ULL ^ (c >> 1)) : (c >> 1);
      t[static_cast<std::size_t>(i)] = c;
    }
    return t;
  }();
  std::uint64_t crc = ~std::uint64_t{0};
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i)
    crc = table[(crc ^ bytes[i]) & 0xff] ^ (crc >> 8);
  return ~crc;
}

inline std::uint64_t crc64(const std::string& s) { return crc64(s.data(), s.size()); }

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < data.size()) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < data.size()) chunk |= static_cast<std::uint32_t>(data[i + 2]);
    out.push_back(alphabet[(chunk >> 18) & 63]);
    out.push_back(alphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < data.size() ? alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < data.size() ? alphabet[chunk & 63] : '=');
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw IntegrityError("base64: bad length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      char c = text[i + static_cast<std::size_t>(j)];
      if (c == '=') {
        vals[j] = 0;
        ++pad;
      } else {
        vals[j] = value_of(c);
        if (vals[j] < 0 || pad > 0) throw IntegrityError("base64: bad character");
      }
    }
    std::uint32_t chunk = (static_cast<std::uint32_t>(vals[0]) << 18) |
                          (static_cast<std::uint32_t>(vals[1]) << 12) |
                          (static_cast<std::uint32_t>(vals[2]) << 6) |
                          static_cast<std::uint32_t>(vals[3]);
    out.push_back(static_cast<std::uint8_t>((chunk >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xff));
  }
  return out;
}

// --- shadow file format -----------------------------------------------------
//
// Line-delimited. Line 1 is a header object; each following line is one
// snapshot; the trailing line carries a CRC-64 of all prior bytes
// (newlines included).

inline constexpr int kShadowFormatVersion = 1;

namespace detail {

inline nlohmann::json input_state_json(const ProductState& ps) {
  nlohmann::json arr = nlohmann::json::array();
  if (ps.all_labeled()) {
    for (int l : ps.labels) arr.push_back(stab_label_name(l));
  } else {
    for (const auto& f : ps.factors)
      arr.push_back({{f[0].real(), f[0].imag()}, {f[1].real(), f[1].imag()}});
  }
  return arr;
}

inline ProductState input_state_from_json(const nlohmann::json& arr) {
  ProductState ps;
  if (!arr.is_array()) throw IntegrityError("shadow header: input_state must be an array");
  for (const auto& item : arr) {
    if (item.is_string()) {
      int l = parse_stab_label(item.get<std::string>());
      ps.factors.push_back(stab_amps(l));
      ps.labels.push_back(l);
    } else {
      auto pair = item.get<std::vector<std::vector<double>>>();
      if (pair.size() != 2 || pair[0].size() != 2 || pair[1].size() != 2)
        throw IntegrityError("shadow header: bad amplitude factor");
      ps.factors.push_back({cplx(pair[0][0], pair[0][1]), cplx(pair[1][0], pair[1][1])});
      ps.labels.push_back(-1);
    }
  }
  return ps;
}

}  // namespace detail

inline std::string shadow_to_string(const ShadowSet& set) {
  std::ostringstream out;
  nlohmann::json header{{"format_version", kShadowFormatVersion},
                        {"kind", shadow_kind_name(set.kind)},
                        {"n", set.n},
                        {"M", set.shots()},
                        {"seed", set.meta.seed},
                        {"input_state", detail::input_state_json(set.meta.input_state)},
                        {"target", set.meta.target}};
  out << header.dump() << "\n";
  if (set.kind == ShadowKind::kPauli) {
    for (const auto& snap : set.pauli)
      out << nlohmann::json{{"b", snap.bases}, {"o", snap.bits}}.dump() << "\n";
  } else {
    for (const auto& snap : set.clifford)
      out << nlohmann::json{{"t", base64_encode(snap.tableau.to_bytes())}, {"o", snap.bits}}.dump()
          << "\n";
  }
  std::string body = out.str();
  body += nlohmann::json{{"crc64", hex64(crc64(body))}}.dump() + "\n";
  return body;
}

inline ShadowSet shadow_from_string(const std::string& text,
                                    std::optional<ShadowKind> expect_kind = std::nullopt) {
  // split off the checksum line
  if (text.empty() || text.back() != '\n')
    throw IntegrityError("shadow file: truncated (missing final newline)");
  const std::size_t last_start = text.rfind('\n', text.size() - 2);
  if (last_start == std::string::npos) throw IntegrityError("shadow file: too short");
  const std::string body = text.substr(0, last_start + 1);
  const std::string trailer = text.substr(last_start + 1, text.size() - last_start - 2);
  nlohmann::json tj;
  try {
    tj = nlohmann::json::parse(trailer);
  } catch (const nlohmann::json::exception&) {
    throw IntegrityError("shadow file: unparsable checksum line");
  }
  if (!tj.contains("crc64")) throw IntegrityError("shadow file: missing checksum");
  if (tj["crc64"].get<std::string>() != hex64(crc64(body)))
    throw IntegrityError("shadow file: checksum mismatch");

  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line)) throw IntegrityError("shadow file: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw IntegrityError("shadow file: unparsable header");
  }
  if (header.value("format_version", -1) != kShadowFormatVersion)
    throw IntegrityError("shadow file: unsupported format_version");

  ShadowSet set;
  const std::string kind = header.value("kind", "");
  if (kind == "pauli")
    set.kind = ShadowKind::kPauli;
  else if (kind == "clifford")
    set.kind = ShadowKind::kClifford;
  else
    throw IntegrityError("shadow file: unknown kind '" + kind + "'");
  if (expect_kind && *expect_kind != set.kind)
    throw IntegrityError("shadow file: kind is '" + kind + "', expected '" +
                         shadow_kind_name(*expect_kind) + "'");
  set.n = header.value("n", 0);
  if (set.n < 1 || set.n > kMaxQubits) throw IntegrityError("shadow file: bad qubit count");
  set.meta.seed = header.value("seed", std::uint64_t{0});
  set.meta.target = header.value("target", "");
  set.meta.input_state = detail::input_state_from_json(header.value("input_state", nlohmann::json::array()));
  const std::size_t shots = header.value("M", std::size_t{0});

  while (std::getline(in, line)) {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw IntegrityError("shadow file: unparsable snapshot line");
    }
    const std::string bits = rec.value("o", "");
    if (static_cast<int>(bits.size()) != set.n)
      throw IntegrityError("shadow file: bad outcome length");
    for (char c : bits)
      if (c != '0' && c != '1') throw IntegrityError("shadow file: bad outcome bit");
    if (set.kind == ShadowKind::kPauli) {
      const std::string bases = rec.value("b", "");
      if (static_cast<int>(bases.size()) != set.n)
        throw IntegrityError("shadow file: bad basis length");
      for (char c : bases)
        if (c != 'X' && c != 'Y' && c != 'Z')
          throw IntegrityError("shadow file: bad basis character");
      set.pauli.push_back(PauliSnapshot{bases, bits});
    } else {
      const auto bytes = base64_decode(rec.value("t", ""));
      set.clifford.push_back(CliffordSnapshot{CliffordTableau::from_bytes(set.n, bytes), bits});
    }
  }
  if (set.shots() != shots)
    throw IntegrityError("shadow file: header claims " + std::to_string(shots) +
                         " snapshots, found " + std::to_string(set.shots()));
  return set;
}

inline void write_shadow(const ShadowSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("write_shadow: cannot open '" + path + "'");
  out << shadow_to_string(set);
  if (!out) throw ValidationError("write_shadow: write failed for '" + path + "'");
}

inline ShadowSet read_shadow(const std::string& path,
                             std::optional<ShadowKind> expect_kind = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("read_shadow: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return shadow_from_string(buf.str(), expect_kind);
}

}  // namespace qsl
