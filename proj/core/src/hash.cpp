#include "infgrand/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>

#include "infgrand/error.hpp"

namespace infgrand {

struct ContentHasher::State {
  EVP_MD_CTX* ctx = nullptr;
  ~State() {
    if (ctx) EVP_MD_CTX_free(ctx);
  }
};

ContentHasher::ContentHasher() : state_(std::make_unique<State>()) {
  state_->ctx = EVP_MD_CTX_new();
  if (!state_->ctx || EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr) != 1)
    throw Error("failed to initialise SHA-256 context");
}

ContentHasher::~ContentHasher() = default;
ContentHasher::ContentHasher(ContentHasher&&) noexcept = default;
ContentHasher& ContentHasher::operator=(ContentHasher&&) noexcept = default;

ContentHasher& ContentHasher::bytes(std::span<const std::uint8_t> data) {
  EVP_DigestUpdate(state_->ctx, data.data(), data.size());
  return *this;
}

ContentHasher& ContentHasher::u64(std::uint64_t value) {
  std::array<std::uint8_t, 8> le{};
  for (int b = 0; b < 8; ++b) le[b] = static_cast<std::uint8_t>(value >> (8 * b));
  return bytes(le);
}

ContentHasher& ContentHasher::f64(double value) { return u64(std::bit_cast<std::uint64_t>(value)); }

ContentHasher& ContentHasher::text(std::string_view s) {
  u64(s.size());
  return bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

ContentHasher& ContentHasher::f64s(std::span<const double> values) {
  u64(values.size());
  for (double v : values) f64(v);
  return *this;
}

std::string ContentHasher::hex_digest() {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(state_->ctx, md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

void hash_into(ContentHasher& h, const Graph& g) {
  h.text("graph").u64(g.num_nodes()).u64(g.num_entries());
  for (std::size_t p : g.row_ptr()) h.u64(p);
  for (NodeId c : g.col_idx()) h.u64(c);
}

void hash_into(ContentHasher& h, const Matrix& m) {
  h.text("matrix").u64(m.rows()).u64(m.cols()).f64s(m.values());
}

std::string graph_features_hash(const Graph& g, const Matrix& features) {
  ContentHasher h;
  hash_into(h, g);
  hash_into(h, features);
  return h.hex_digest();
}

}  // namespace infgrand
