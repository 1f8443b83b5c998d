#include "bercow/sro.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <boost/multiprecision/miller_rabin.hpp>

#include "bercow/crypto.hpp"

namespace bercow::sro {

namespace mp = boost::multiprecision;

namespace {

bool is_probable_prime(const BigInt& x) {
  if (x < 2) return false;
  std::mt19937_64 gen(0x5eed);  // fixed: primality answers must be reproducible
  return mp::miller_rabin_test(x, 40, gen);
}

BigInt mod(const BigInt& x, const BigInt& m) {
  BigInt r = x % m;
  if (r < 0) r += m;
  return r;
}

}  // namespace

void SroConfig::validate() const {
  if (n == 0) fail(ErrorCategory::config, "SRO needs at least one node");
  if (n < 3 * f + 1) {
    fail(ErrorCategory::config, "SRO needs n >= 3f+1 (n=" + std::to_string(n) +
                                    ", f=" + std::to_string(f) + ")");
  }
}

DprfGroup DprfGroup::production() {
  DprfGroup g;
  g.order = BigInt("340282366920938463463374607431768219863");
  g.modulus = 2 * g.order + 1;
  g.generator = 4;
  return g;
}

DprfGroup DprfGroup::for_test_field(std::uint64_t p) {
  if (p < 5 || !is_probable_prime(BigInt(p))) {
    fail(ErrorCategory::config, "test field must be a prime >= 5, got " + std::to_string(p));
  }
  DprfGroup g;
  g.order = p;
  for (BigInt m = 2;; m += 2) {
    BigInt candidate = m * g.order + 1;
    if (is_probable_prime(candidate)) {
      g.modulus = candidate;
      for (BigInt base = 2;; ++base) {
        BigInt gen = BigInt(mp::powm(base, m, candidate));
        if (gen != 1) {
          g.generator = gen;
          return g;
        }
      }
    }
  }
}

std::size_t DprfGroup::proof_rounds() const {
  auto security_bits = static_cast<std::size_t>(mp::msb(order));  // floor(log2 p)
  return security_bits >= 128 ? 1 : (128 + security_bits - 1) / security_bits;
}

std::size_t DprfGroup::element_bytes() const { return mp::msb(modulus) / 8 + 1; }

BigInt DprfGroup::pow(const BigInt& base, const BigInt& exponent) const {
  return BigInt(mp::powm(base, exponent, modulus));
}

bool DprfGroup::in_subgroup(const BigInt& x) const {
  return x > 0 && x < modulus && pow(x, order) == 1;
}

Bytes DprfGroup::encode(const BigInt& x) const {
  Bytes raw;
  mp::export_bits(x, std::back_inserter(raw), 8);
  Bytes out(element_bytes(), 0);
  require(raw.size() <= out.size(), "group element too large to encode");
  std::copy(raw.begin(), raw.end(), out.end() - static_cast<std::ptrdiff_t>(raw.size()));
  return out;
}

BigInt DprfGroup::hash_to_field(ByteView data) const {
  for (std::uint64_t ctr = 0;; ++ctr) {
    auto d = HashInput("bercow.h2f").add(data).add_u64(ctr).digest();
    BigInt x;
    mp::import_bits(x, d.begin(), d.end(), 8);
    x %= order;
    if (x != 0) return x;
  }
}

BigInt DprfGroup::hash_to_group(std::uint64_t k) const {
  BigInt cofactor = (modulus - 1) / order;
  for (std::uint64_t ctr = 0;; ++ctr) {
    auto d = HashInput("bercow.h2g").add_u64(k).add_u64(ctr).digest();
    BigInt x;
    mp::import_bits(x, d.begin(), d.end(), 8);
    x = pow(x % modulus, cofactor);
    if (x > 1) return x;
  }
}

BigInt lagrange_at_zero(std::span<const BigInt> xs, std::size_t i, const BigInt& p) {
  BigInt num = 1;
  BigInt den = 1;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (j == i) continue;
    num = mod(num * xs[j], p);
    den = mod(den * (xs[j] - xs[i]), p);
  }
  require(den != 0, "duplicate x-coordinate in Lagrange interpolation");
  // p is prime: den^{-1} = den^{p-2}.
  BigInt inv = mp::powm(den, BigInt(p - 2), p);
  return mod(num * inv, p);
}

BigInt node_commitment(const DprfGroup& group, std::span<const BigInt> coefficient_commitments,
                       NodeId node) {
  BigInt x = BigInt(node) + 1;
  BigInt power = 1;
  BigInt acc = 1;
  for (const auto& a : coefficient_commitments) {
    acc = (acc * group.pow(a, power)) % group.modulus;
    power = (power * x) % group.order;
  }
  return acc;
}

namespace {

Bytes dleq_transcript(const DprfGroup& group, std::uint64_t k, const BigInt& h,
                      const Share& share, std::span<const BigInt> a1, std::span<const BigInt> a2) {
  HashInput in("bercow.dleq");
  in.add_u64(k).add_u64(share.node);
  in.add(group.encode(group.generator)).add(group.encode(h));
  in.add(group.encode(share.commitment)).add(group.encode(share.value));
  for (std::size_t j = 0; j < a1.size(); ++j) in.add(group.encode(a1[j])).add(group.encode(a2[j]));
  return in.bytes();
}

BigInt round_challenge(const DprfGroup& group, const Bytes& transcript, std::size_t round) {
  Bytes msg = transcript;
  append_u64(msg, round);
  return group.hash_to_field(msg);
}

DleqProof prove_dleq(const DprfGroup& group, std::uint64_t k, const BigInt& h,
                     const BigInt& secret, const Share& share) {
  const std::size_t rounds = group.proof_rounds();
  std::vector<BigInt> nonces, a1, a2;
  for (std::size_t j = 0; j < rounds; ++j) {
    Bytes msg = group.encode(secret);
    append_u64(msg, k);
    append_u64(msg, j);
    auto w = group.hash_to_field(HashInput("bercow.dleq-nonce").add(msg).bytes());
    nonces.push_back(w);
    a1.push_back(group.pow(group.generator, w));
    a2.push_back(group.pow(h, w));
  }
  auto transcript = dleq_transcript(group, k, h, share, a1, a2);
  DleqProof proof;
  for (std::size_t j = 0; j < rounds; ++j) {
    auto c = round_challenge(group, transcript, j);
    proof.challenges.push_back(c);
    proof.responses.push_back(mod(nonces[j] + c * secret, group.order));
  }
  return proof;
}

}  // namespace

bool share_valid(const DprfGroup& group, std::uint64_t k, const Share& share) {
  const std::size_t rounds = group.proof_rounds();
  if (share.proof.challenges.size() != rounds || share.proof.responses.size() != rounds) {
    return false;
  }
  if (!group.in_subgroup(share.value) || !group.in_subgroup(share.commitment)) return false;
  BigInt h = group.hash_to_group(k);
  std::vector<BigInt> a1, a2;
  for (std::size_t j = 0; j < rounds; ++j) {
    const auto& c = share.proof.challenges[j];
    const auto& z = share.proof.responses[j];
    if (c < 0 || c >= group.order || z < 0 || z >= group.order) return false;
    BigInt neg_c = mod(-c, group.order);
    a1.push_back(group.pow(group.generator, z) * group.pow(share.commitment, neg_c) % group.modulus);
    a2.push_back(group.pow(h, z) * group.pow(share.value, neg_c) % group.modulus);
  }
  auto transcript = dleq_transcript(group, k, h, share, a1, a2);
  for (std::size_t j = 0; j < rounds; ++j) {
    if (round_challenge(group, transcript, j) != share.proof.challenges[j]) return false;
  }
  return true;
}

RandomValue combine_shares(const DprfGroup& group, std::span<const Share> shares) {
  require(!shares.empty(), "no shares to combine");
  std::vector<BigInt> xs;
  std::set<NodeId> nodes;
  for (const auto& s : shares) {
    require(nodes.insert(s.node).second, "duplicate node among combined shares");
    xs.push_back(BigInt(s.node) + 1);
  }
  BigInt acc = 1;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    auto lambda = lagrange_at_zero(xs, i, group.order);
    acc = acc * group.pow(shares[i].value, lambda) % group.modulus;
  }
  return HashInput("bercow.dprf-out").add(group.encode(acc)).digest();
}

Digest seeded_proof_digest(std::uint64_t k, const RandomValue& r) {
  return HashInput("bercow.seeded-proof").add_u64(k).add(r).digest();
}

struct SroHandle::State {
  SroConfig config;
  std::vector<Digest> node_keys;
  // Seeded-hash backend. Sealed: only reachable through reveal().
  Seed seed{};
  // Threshold backend.
  DprfGroup group;
  std::vector<BigInt> key_shares;               // s_i
  std::vector<BigInt> coefficient_commitments;  // g^{a_j}
  std::vector<BigInt> node_commitments;         // g^{s_i}
};

SroHandle SroHandle::init(const SroConfig& config, const Seed& rng_seed) {
  config.validate();
  auto state = std::make_shared<State>();
  state->config = config;
  for (std::size_t i = 0; i < config.n; ++i) {
    state->node_keys.push_back(HashInput("bercow.node-key").add(rng_seed).add_u64(i).digest());
  }
  if (config.backend == Backend::seeded_hash) {
    auto d = HashInput("bercow.tee-seed").add(rng_seed).digest();
    std::copy_n(d.begin(), state->seed.size(), state->seed.begin());
  } else {
    state->group = config.test_field ? DprfGroup::for_test_field(*config.test_field)
                                     : DprfGroup::production();
    const auto& grp = state->group;
    if (BigInt(config.n) >= grp.order) {
      fail(ErrorCategory::config, "field too small for " + std::to_string(config.n) + " nodes");
    }
    // Degree quorum-1 polynomial; coefficient 0 is the master secret.
    std::vector<BigInt> coefficients;
    for (std::size_t j = 0; j < config.quorum(); ++j) {
      Bytes msg(rng_seed.begin(), rng_seed.end());
      append_u64(msg, j);
      coefficients.push_back(grp.hash_to_field(HashInput("bercow.dprf-coef").add(msg).bytes()));
      state->coefficient_commitments.push_back(grp.pow(grp.generator, coefficients.back()));
    }
    for (std::size_t i = 0; i < config.n; ++i) {
      BigInt x = BigInt(i) + 1;
      BigInt acc = 0;
      for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = mod(acc * x + *it, grp.order);
      }
      state->key_shares.push_back(acc);
      state->node_commitments.push_back(grp.pow(grp.generator, acc));
    }
  }
  return SroHandle(std::move(state));
}

const SroConfig& SroHandle::config() const { return state_->config; }

const DprfGroup& SroHandle::group() const { return state_->group; }

std::span<const BigInt> SroHandle::coefficient_commitments() const {
  return state_->coefficient_commitments;
}

bool SroHandle::verify(std::uint64_t k, const Proof& proof, const RandomValue& r) const {
  if (const auto* tp = std::get_if<ThresholdProof>(&proof)) {
    if (state_->config.backend != Backend::threshold_dprf) return false;
    if (!(tp->group == state_->group) || tp->quorum != state_->config.quorum()) return false;
    if (!std::equal(tp->coefficient_commitments.begin(), tp->coefficient_commitments.end(),
                    state_->coefficient_commitments.begin(), state_->coefficient_commitments.end())) {
      return false;
    }
  } else if (state_->config.backend != Backend::seeded_hash) {
    return false;
  }
  return bercow::sro::verify(k, proof, r);
}

namespace {

Bytes slot_message(std::uint64_t k) {
  Bytes msg(as_bytes("bercow.slot").begin(), as_bytes("bercow.slot").end());
  append_u64(msg, k);
  return msg;
}

}  // namespace

NodeSignature SroHandle::sign(NodeId node, std::uint64_t k) const {
  require(node < state_->config.n, "unknown node " + std::to_string(node));
  return {node, hmac_sha512(state_->node_keys[node], slot_message(k))};
}

std::vector<NodeSignature> SroHandle::quorum_certificate(std::uint64_t k) const {
  std::vector<NodeSignature> sigs;
  for (NodeId i = 0; i < state_->config.quorum(); ++i) sigs.push_back(sign(i, k));
  return sigs;
}

bool SroHandle::signature_valid(std::uint64_t k, const NodeSignature& sig) const {
  if (sig.node >= state_->config.n) return false;
  return hmac_sha512(state_->node_keys[sig.node], slot_message(k)) == sig.tag;
}

std::size_t SroHandle::count_valid_signatures(std::uint64_t k,
                                              std::span<const NodeSignature> sigs) const {
  std::set<NodeId> valid;
  for (const auto& s : sigs) {
    if (signature_valid(k, s)) valid.insert(s.node);
  }
  return valid.size();
}

void SroHandle::check_authorized(std::uint64_t k, std::span<const NodeSignature> sigs) const {
  auto valid = count_valid_signatures(k, sigs);
  if (valid < state_->config.quorum()) {
    throw SroError(SroErrorCode::invalid_signature_set,
                   "slot " + std::to_string(k) + ": " + std::to_string(valid) +
                       " valid signatures, need " + std::to_string(state_->config.quorum()));
  }
}

Share SroHandle::produce_share(NodeId node, std::uint64_t k,
                               std::span<const NodeSignature> signatures) const {
  require(state_->config.backend == Backend::threshold_dprf,
          "produce_share needs the threshold backend");
  require(node < state_->config.n, "unknown node " + std::to_string(node));
  check_authorized(k, signatures);
  const auto& grp = state_->group;
  BigInt h = grp.hash_to_group(k);
  Share share;
  share.node = node;
  share.value = grp.pow(h, state_->key_shares[node]);
  share.commitment = state_->node_commitments[node];
  share.proof = prove_dleq(grp, k, h, state_->key_shares[node], share);
  return share;
}

std::vector<Share> SroHandle::collect_shares(std::uint64_t k, std::span<const NodeSignature> sigs,
                                             std::span<const NodeId> faulty) const {
  check_authorized(k, sigs);
  const auto& cfg = state_->config;
  std::vector<Share> valid;
  for (NodeId i = 0; i < cfg.n && valid.size() < cfg.quorum(); ++i) {
    Share s = produce_share(i, k, sigs);
    if (std::find(faulty.begin(), faulty.end(), i) != faulty.end()) {
      s.value = s.value * state_->group.generator % state_->group.modulus;
    }
    if (s.commitment == state_->node_commitments[i] && share_valid(state_->group, k, s)) {
      valid.push_back(std::move(s));
    }
  }
  if (valid.size() < cfg.quorum()) {
    throw SroError(SroErrorCode::insufficient_valid_shares,
                   "slot " + std::to_string(k) + ": only " + std::to_string(valid.size()) +
                       " valid shares, need " + std::to_string(cfg.quorum()));
  }
  return valid;
}

RandomValue SroHandle::reveal(const RevealRequest& req,
                              std::span<const NodeId> faulty_share_nodes) const {
  if (state_->config.backend == Backend::seeded_hash) {
    check_authorized(req.slot, req.signatures);
    Bytes msg(state_->seed.begin(), state_->seed.end());
    append_u64(msg, req.slot);
    return sha512(msg);
  }
  auto shares = collect_shares(req.slot, req.signatures, faulty_share_nodes);
  return combine_shares(state_->group, shares);
}

Proof SroHandle::generate_proof(std::uint64_t k, std::span<const NodeSignature> signatures) const {
  if (state_->config.backend == Backend::seeded_hash) {
    // The enclave computes R(k) internally and returns only its hash.
    Bytes msg(state_->seed.begin(), state_->seed.end());
    append_u64(msg, k);
    return SeededProof{seeded_proof_digest(k, sha512(msg))};
  }
  ThresholdProof proof;
  proof.group = state_->group;
  proof.quorum = state_->config.quorum();
  proof.coefficient_commitments = state_->coefficient_commitments;
  proof.shares = collect_shares(k, signatures, {});
  return proof;
}

bool verify(std::uint64_t k, const Proof& proof, const RandomValue& r) {
  if (const auto* seeded = std::get_if<SeededProof>(&proof)) {
    return seeded_proof_digest(k, r) == seeded->digest;
  }
  const auto& tp = std::get<ThresholdProof>(proof);
  const auto& grp = tp.group;
  if (tp.quorum == 0 || tp.coefficient_commitments.size() != tp.quorum) return false;
  if (grp.order < 2 || grp.modulus <= grp.order || !grp.in_subgroup(grp.generator) ||
      grp.generator == 1) {
    return false;
  }
  for (const auto& a : tp.coefficient_commitments) {
    if (!grp.in_subgroup(a)) return false;
  }
  std::set<NodeId> nodes;
  std::vector<Share> usable;
  for (const auto& s : tp.shares) {
    if (!nodes.insert(s.node).second) return false;
    if (s.commitment != node_commitment(grp, tp.coefficient_commitments, s.node)) return false;
    if (!share_valid(grp, k, s)) return false;
    if (usable.size() < tp.quorum) usable.push_back(s);
  }
  if (usable.size() < tp.quorum) return false;
  return combine_shares(grp, usable) == r;
}

std::string describe(const Proof& proof) {
  std::ostringstream out;
  if (const auto* seeded = std::get_if<SeededProof>(&proof)) {
    out << "seeded-hash proof " << to_hex(seeded->digest);
    return out.str();
  }
  const auto& tp = std::get<ThresholdProof>(proof);
  out << "threshold proof p=" << tp.group.order << " P=" << tp.group.modulus
      << " g=" << tp.group.generator << " quorum=" << tp.quorum << "\n";
  for (std::size_t j = 0; j < tp.coefficient_commitments.size(); ++j) {
    out << "  A" << j << " = " << to_hex(tp.group.encode(tp.coefficient_commitments[j])) << "\n";
  }
  for (const auto& s : tp.shares) {
    out << "  share node=" << s.node << " value=" << to_hex(tp.group.encode(s.value))
        << " commitment=" << to_hex(tp.group.encode(s.commitment)) << "\n";
  }
  return out.str();
}

}  // namespace bercow::sro
