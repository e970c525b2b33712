#include "scalelab/datapipe.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scalelab/io.hpp"
#include "scalelab/rng.hpp"

namespace scalelab::datapipe {

using nlohmann::json;

TokensSeen tokens_seen(double p, uint64_t steps, uint64_t batch_size,
                       uint64_t seq_len) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("tokens_seen: p must lie in [0, 1]");
  TokensSeen out;
  out.total = steps * batch_size * seq_len;
  out.pt = static_cast<uint64_t>(
      std::llround(p * static_cast<double>(out.total)));
  out.ft = out.total - out.pt;
  return out;
}

uint16_t pack_masked(uint16_t token_id, bool masked) {
  if (token_id >= 0x8000)
    throw std::invalid_argument("pack_masked: token id needs 15 bits");
  return static_cast<uint16_t>(token_id | (masked ? 0x8000 : 0));
}

std::pair<uint16_t, bool> unpack_masked(uint16_t packed) {
  return {static_cast<uint16_t>(packed & 0x7FFF), (packed & 0x8000) != 0};
}

std::vector<size_t> masked_positions(std::span<const uint16_t> packed) {
  std::vector<size_t> out;
  for (size_t i = 0; i < packed.size(); ++i)
    if (packed[i] & 0x8000) out.push_back(i);
  return out;
}

namespace {

const char* policy_tag(CyclePolicy p) {
  return p == CyclePolicy::repeat_epochs ? "repeat_epochs"
                                         : "stream_once_then_repeat";
}

CyclePolicy policy_from_tag(const std::string& tag) {
  if (tag == "repeat_epochs") return CyclePolicy::repeat_epochs;
  if (tag == "stream_once_then_repeat")
    return CyclePolicy::stream_once_then_repeat;
  throw io::ParseError("unknown cycle policy '" + tag + "'");
}

std::string basename_of(const std::string& path) {
  size_t pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

std::string dirname_of(const std::string& path) {
  size_t pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string() : path.substr(0, pos + 1);
}

} // namespace

void write_domain_stream(const DomainStream& stream,
                         const std::string& tokens_path,
                         const std::string& manifest_path) {
  std::ofstream out(tokens_path, std::ios::binary);
  if (!out) throw io::ParseError("cannot write " + tokens_path);
  json lengths = json::array();
  for (const auto& seq : stream.sequences) {
    lengths.push_back(seq.size());
    for (uint16_t t : seq) {
      char bytes[2] = {static_cast<char>(t & 0xFF),
                       static_cast<char>(t >> 8)};
      out.write(bytes, 2);
    }
  }
  out.close();

  json manifest;
  manifest["name"] = stream.name;
  manifest["tokens_file"] = basename_of(tokens_path);
  manifest["sequence_lengths"] = lengths;
  if (stream.unique_token_budget)
    manifest["unique_token_budget"] = *stream.unique_token_budget;
  else
    manifest["unique_token_budget"] = nullptr;
  manifest["cycle_policy"] = policy_tag(stream.cycle_policy);
  io::write_file(manifest_path, manifest.dump(2) + "\n");
}

DomainStream read_domain_stream(const std::string& manifest_path) {
  json manifest = json::parse(io::read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object())
    throw io::ParseError(manifest_path + ": invalid manifest");

  DomainStream s;
  s.name = manifest.at("name").get<std::string>();
  const json& budget = manifest.at("unique_token_budget");
  if (!budget.is_null()) s.unique_token_budget = budget.get<uint64_t>();
  s.cycle_policy =
      policy_from_tag(manifest.at("cycle_policy").get<std::string>());

  std::string tokens_path =
      dirname_of(manifest_path) + manifest.at("tokens_file").get<std::string>();
  std::string raw = io::read_file(tokens_path);
  if (raw.size() % 2 != 0)
    throw io::ParseError(tokens_path + ": odd byte count");

  std::vector<uint64_t> lengths =
      manifest.at("sequence_lengths").get<std::vector<uint64_t>>();
  uint64_t total = 0;
  for (uint64_t l : lengths) total += l;
  if (total * 2 != raw.size())
    throw io::ParseError(tokens_path + ": size disagrees with manifest");

  size_t off = 0;
  for (uint64_t l : lengths) {
    std::vector<uint16_t> seq(l);
    for (uint64_t i = 0; i < l; ++i) {
      seq[i] = static_cast<uint16_t>(
          static_cast<unsigned char>(raw[off]) |
          (static_cast<unsigned char>(raw[off + 1]) << 8));
      off += 2;
    }
    s.sequences.push_back(std::move(seq));
  }
  return s;
}

std::vector<MixturePick> sample_mixture(const DomainStream& ft,
                                        const DomainStream& pt, double p,
                                        uint64_t seed, uint64_t n_picks) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_mixture: p must lie in [0, 1]");
  std::vector<MixturePick> picks;
  picks.reserve(n_picks);
  uint64_t cursor[2] = {0, 0};
  const size_t sizes[2] = {ft.sequences.size(), pt.sequences.size()};
  for (uint64_t i = 0; i < n_picks; ++i) {
    rng::SubStream stream(seed, "mixture", i);
    int source = stream.uniform() < p ? 1 : 0;
    if (sizes[source] == 0)
      throw std::invalid_argument(
          std::string("sample_mixture: selected empty ") +
          (source == 1 ? "pt" : "ft") + " stream");
    uint64_t row = cursor[source] % sizes[source];
    ++cursor[source];
    picks.push_back({i, row, source});
  }
  return picks;
}

void write_mixture_manifest(const std::string& path,
                            std::span<const MixturePick> picks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::ParseError("cannot write " + path);
  out << "step,row,source\n";
  for (const MixturePick& pk : picks)
    out << pk.step << "," << pk.row << "," << (pk.source == 1 ? "pt" : "ft")
        << "\n";
}

std::vector<MixturePick> read_mixture_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || (line != "step,row,source" &&
                                  line != "step,row,source\r"))
    throw io::ParseError(path + ": expected header step,row,source");
  std::vector<MixturePick> picks;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t c1 = line.find(',');
    size_t c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw io::ParseError(path + ": line " + std::to_string(lineno) +
                           ": expected 3 columns");
    MixturePick pk;
    auto parse_field = [&](const char* begin, const char* end, uint64_t& v) {
      auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc() || res.ptr != end)
        throw io::ParseError(path + ": line " + std::to_string(lineno) +
                             ": bad integer");
    };
    parse_field(line.data(), line.data() + c1, pk.step);
    parse_field(line.data() + c1 + 1, line.data() + c2, pk.row);
    std::string src = line.substr(c2 + 1);
    if (src == "ft")
      pk.source = 0;
    else if (src == "pt")
      pk.source = 1;
    else
      throw io::ParseError(path + ": line " + std::to_string(lineno) +
                           ": unknown source '" + src + "'");
    picks.push_back(pk);
  }
  return picks;
}

FlatStream flatten(const DomainStream& stream) {
  FlatStream flat;
  for (const auto& seq : stream.sequences)
    flat.tokens.insert(flat.tokens.end(), seq.begin(), seq.end());
  if (flat.tokens.empty())
    throw std::invalid_argument("flatten: stream has no tokens");
  uint64_t total = flat.tokens.size();
  if (stream.unique_token_budget) {
    flat.wrap_len = std::min(*stream.unique_token_budget, total);
    if (flat.wrap_len == 0)
      throw std::invalid_argument("flatten: zero token budget");
    flat.count_epochs = true;
  } else {
    flat.wrap_len = total;
    flat.count_epochs = false;
  }
  return flat;
}

std::vector<uint16_t> next_epoch_batch(const FlatStream& stream,
                                       StreamCursor& cursor, int batch_size,
                                       int seq_len) {
  if (batch_size <= 0 || seq_len <= 0)
    throw std::invalid_argument("next_epoch_batch: nonpositive shape");
  uint64_t need = static_cast<uint64_t>(batch_size) * seq_len;
  std::vector<uint16_t> out;
  out.reserve(need);
  for (uint64_t i = 0; i < need; ++i) {
    out.push_back(stream.tokens[cursor.pos]);
    ++cursor.pos;
    if (cursor.pos >= stream.wrap_len) {
      cursor.pos = 0;
      if (stream.count_epochs) ++cursor.epoch;
    }
  }
  return out;
}

} // namespace scalelab::datapipe
