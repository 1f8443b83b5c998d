// Secret random oracle: Reveal / Generate / Verify over slot indices, with a
// seeded-hash backend (trusted-hardware model) and a threshold DPRF backend.
//
// Reveal only answers for a slot k once n-f distinct nodes have signed k.
// Node signatures are HMAC-SHA512 tags under per-node keys that the oracle
// knows. The threshold backend is a DDH-style DPRF over an order-p subgroup
// of Z*_P: node i holds a Shamir share s_i of the master secret s, answers
// with H(k)^{s_i} plus a Chaum-Pedersen proof against its Feldman
// commitment, and any n-f valid shares combine to H(k)^s.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bercow/common.hpp"
#include "bercow/domain.hpp"

namespace bercow::sro {

using BigInt = boost::multiprecision::cpp_int;
using Seed = std::array<std::uint8_t, 32>;
using RandomValue = Digest;

enum class Backend { seeded_hash, threshold_dprf };

struct SroConfig {
  std::size_t n = 4;
  std::size_t f = 1;
  Backend backend = Backend::seeded_hash;
  /// Small prime order for the threshold backend's test mode.
  std::optional<std::uint64_t> test_field;

  std::size_t quorum() const { return n - f; }
  void validate() const;
};

enum class SroErrorCode { invalid_signature_set, insufficient_valid_shares };

class SroError : public Error {
 public:
  SroError(SroErrorCode code, const std::string& what)
      : Error(ErrorCategory::sro, what), code_(code) {}
  SroErrorCode code() const noexcept { return code_; }

 private:
  SroErrorCode code_;
};

struct RevealRequest {
  std::uint64_t slot = 0;
  std::vector<NodeSignature> signatures;
};

/// Order-p subgroup of Z*_P with P = m*p + 1.
struct DprfGroup {
  BigInt order;      // p
  BigInt modulus;    // P
  BigInt generator;  // g, order p

  /// p = 2^128 + 0x20d7, P = 2p + 1 (a safe prime), g = 4.
  static DprfGroup production();
  /// Test-mode group for a small prime p (smallest even m with m*p+1 prime).
  static DprfGroup for_test_field(std::uint64_t p);

  /// Parallel repetitions of the share proof so soundness error <= 2^-128.
  std::size_t proof_rounds() const;
  std::size_t element_bytes() const;

  BigInt pow(const BigInt& base, const BigInt& exponent) const;
  bool in_subgroup(const BigInt& x) const;
  /// HASH(data) mod p, rehashed until nonzero.
  BigInt hash_to_field(ByteView data) const;
  /// Subgroup element derived from k with unknown discrete log.
  BigInt hash_to_group(std::uint64_t k) const;
  Bytes encode(const BigInt& x) const;

  bool operator==(const DprfGroup&) const = default;
};

/// Chaum-Pedersen proof that log_g(commitment) = log_{H(k)}(value), repeated
/// proof_rounds() times under one Fiat-Shamir hash.
struct DleqProof {
  std::vector<BigInt> challenges;
  std::vector<BigInt> responses;
};

struct Share {
  NodeId node = 0;
  BigInt value;       // H(k)^{s_i} mod P
  BigInt commitment;  // g^{s_i} mod P
  DleqProof proof;
};

struct SeededProof {
  Digest digest{};  // HASH(k || R(k))
};

Digest seeded_proof_digest(std::uint64_t k, const RandomValue& r);

struct ThresholdProof {
  DprfGroup group;
  std::size_t quorum = 0;
  std::vector<BigInt> coefficient_commitments;  // g^{a_j}, j = 0..quorum-1
  std::vector<Share> shares;
};

using Proof = std::variant<SeededProof, ThresholdProof>;

/// Feldman commitment of node i: prod_j A_j^{(i+1)^j}.
BigInt node_commitment(const DprfGroup& group, std::span<const BigInt> coefficient_commitments,
                       NodeId node);

/// Valid(k, share): subgroup membership plus the DLEQ proof.
bool share_valid(const DprfGroup& group, std::uint64_t k, const Share& share);

/// Lagrange-combines shares in the exponent and hashes: HASH(H(k)^s).
/// Shares must come from distinct nodes.
RandomValue combine_shares(const DprfGroup& group, std::span<const Share> shares);

/// Lagrange coefficient at 0 for x-coordinate xs[i] over Z_p.
BigInt lagrange_at_zero(std::span<const BigInt> xs, std::size_t i, const BigInt& p);

bool verify(std::uint64_t k, const Proof& proof, const RandomValue& r);

std::string describe(const Proof& proof);

class SroHandle {
 public:
  /// Deterministic in (config, rng_seed). Throws on n < 3f+1.
  static SroHandle init(const SroConfig& config, const Seed& rng_seed);

  const SroConfig& config() const;

  /// Node `node` signs slot k.
  NodeSignature sign(NodeId node, std::uint64_t k) const;
  /// Signatures from nodes 0..quorum-1.
  std::vector<NodeSignature> quorum_certificate(std::uint64_t k) const;
  bool signature_valid(std::uint64_t k, const NodeSignature& sig) const;
  std::size_t count_valid_signatures(std::uint64_t k, std::span<const NodeSignature> sigs) const;

  /// R(k). Threshold backend: nodes in `faulty_share_nodes` answer with
  /// corrupted shares, which the aggregator must reject.
  RandomValue reveal(const RevealRequest& req,
                     std::span<const NodeId> faulty_share_nodes = {}) const;

  /// Seeded: HASH(k || R(k)), no authorization needed. Threshold: commitments plus
  /// the quorum shares, which requires the same signatures as reveal.
  Proof generate_proof(std::uint64_t k, std::span<const NodeSignature> signatures = {}) const;

  /// Node-local Produce for the threshold backend.
  Share produce_share(NodeId node, std::uint64_t k, std::span<const NodeSignature> signatures) const;

  const DprfGroup& group() const;
  std::span<const BigInt> coefficient_commitments() const;

  /// verify() with the proof's public key pinned to this oracle's.
  bool verify(std::uint64_t k, const Proof& proof, const RandomValue& r) const;

  struct State;

 private:
  explicit SroHandle(std::shared_ptr<const State> state) : state_(std::move(state)) {}
  void check_authorized(std::uint64_t k, std::span<const NodeSignature> sigs) const;
  std::vector<Share> collect_shares(std::uint64_t k, std::span<const NodeSignature> sigs,
                                    std::span<const NodeId> faulty) const;

  std::shared_ptr<const State> state_;
};

}  // namespace bercow::sro
