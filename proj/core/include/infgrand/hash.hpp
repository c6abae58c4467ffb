#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "infgrand/graph.hpp"
#include "infgrand/matrix.hpp"

namespace infgrand {

// Incremental SHA-256 over a canonical little-endian encoding, so digests are
// identical on every platform.
class ContentHasher {
 public:
  ContentHasher();
  ~ContentHasher();
  ContentHasher(ContentHasher&&) noexcept;
  ContentHasher& operator=(ContentHasher&&) noexcept;

  ContentHasher& bytes(std::span<const std::uint8_t> data);
  ContentHasher& u64(std::uint64_t value);
  ContentHasher& f64(double value);
  ContentHasher& text(std::string_view s);
  ContentHasher& f64s(std::span<const double> values);

  // Lowercase hex digest; the hasher cannot be reused afterwards.
  std::string hex_digest();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

void hash_into(ContentHasher& h, const Graph& g);
void hash_into(ContentHasher& h, const Matrix& m);

// Digest of (graph, features); keys the influence and propagation caches.
std::string graph_features_hash(const Graph& g, const Matrix& features);

}  // namespace infgrand
