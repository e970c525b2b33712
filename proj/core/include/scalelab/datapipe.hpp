#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scalelab::datapipe {

struct TokensSeen {
  uint64_t total = 0;
  uint64_t ft = 0;
  uint64_t pt = 0;
};

// Token budget split implied by an injection fraction p over a run.
TokensSeen tokens_seen(double p, uint64_t steps, uint64_t batch_size,
                       uint64_t seq_len);

// A token id (15 bits) and a loss-mask flag in one u16.
uint16_t pack_masked(uint16_t token_id, bool masked);
std::pair<uint16_t, bool> unpack_masked(uint16_t packed);
std::vector<size_t> masked_positions(std::span<const uint16_t> packed);

enum class CyclePolicy { repeat_epochs, stream_once_then_repeat };

struct DomainStream {
  std::string name;
  std::vector<std::vector<uint16_t>> sequences; // packed token ids
  std::optional<uint64_t> unique_token_budget;
  CyclePolicy cycle_policy = CyclePolicy::repeat_epochs;
};

// tokens file: raw little-endian u16; manifest: JSON with the name,
// per-sequence lengths, budget, policy, and the tokens filename.
void write_domain_stream(const DomainStream& stream,
                         const std::string& tokens_path,
                         const std::string& manifest_path);
DomainStream read_domain_stream(const std::string& manifest_path);

// One emitted sequence of a two-source mixture.
struct MixturePick {
  uint64_t step = 0; // emission index
  uint64_t row = 0;  // index into the chosen source's sequence list
  int source = 0;    // 0 = ft, 1 = pt
};

// Per-sequence source choice: pick i goes to the injected source when
// the i-th addressed uniform draw falls below p, so p = 0 and p = 1 are
// exact. Each source is consumed in order, wrapping around.
std::vector<MixturePick> sample_mixture(const DomainStream& ft,
                                        const DomainStream& pt, double p,
                                        uint64_t seed, uint64_t n_picks);

void write_mixture_manifest(const std::string& path,
                            std::span<const MixturePick> picks);
std::vector<MixturePick> read_mixture_manifest(const std::string& path);

// Budget-limited flattened view for epoch accounting.
struct FlatStream {
  std::vector<uint16_t> tokens;
  uint64_t wrap_len = 0;
  bool count_epochs = false; // only finite budgets advance the epoch
};

FlatStream flatten(const DomainStream& stream);

struct StreamCursor {
  uint64_t pos = 0;
  uint64_t epoch = 0;
};

// Consumes batch_size * seq_len tokens from the budget prefix, wrapping
// and counting epochs as it goes.
std::vector<uint16_t> next_epoch_batch(const FlatStream& stream,
                                       StreamCursor& cursor, int batch_size,
                                       int seq_len);

} // namespace scalelab::datapipe
