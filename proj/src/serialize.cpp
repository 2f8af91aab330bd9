// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "encctl/errors.hpp"

namespace encctl {

namespace {

constexpr char kMagic[4] = {'E', 'N', 'C', 'T'};
constexpr std::uint64_t kMaxCount = 1ULL << 24;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t k) { out_.append(p, k); }

  void header(const BlobHeader& h) {
    raw(kMagic, 4);
    u32(h.version);
    u32(static_cast<std::uint32_t>(h.kind));
    u64(h.degree);
    u64(h.modulus);
    i64(h.base);
    f64(h.bound);
    f64(h.sd);
  }
  void poly(const Poly& p) {
    u64(p.size());
    for (auto c : p.coeffs()) i64(c);
  }
  void ct(const RlweCt& c) {
    poly(c.b);
    poly(c.a);
  }
  void cts(const std::vector<RlweCt>& c) {
    u64(c.size());
    for (const auto& x : c) ct(x);
  }
  void gsw(const RgswCt& g) {
    u64(g.columns().size());
    for (const auto& c : g.columns()) ct(c);
  }
  void gsws(const std::vector<RgswCt>& g) {
    u64(g.size());
    for (const auto& x : g) gsw(x);
  }
  void gsw_matrix(const GswMatrix& m) {
    u64(m.size());
    for (const auto& row : m) gsws(row);
  }
  void autokeys(const AutomorphismKeySet& k) {
    u64(k.size());
    for (const auto& [theta, key] : k.keys()) {
      u64(theta);
      gsw(key.ak);
    }
  }
  std::string take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view in, const CryptoParams* params)
      : in_(in), params_(params) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
  double f64() { return std::bit_cast<double>(get(8)); }

  BlobHeader header() {
    need(4);
    if (std::memcmp(in_.data() + pos_, kMagic, 4) != 0) {
      throw FormatError("bad magic");
    }
    pos_ += 4;
    BlobHeader h;
    h.version = u32();
    if (h.version != kFormatVersion) throw FormatError("unsupported version");
    h.kind = static_cast<BlobKind>(u32());
    h.degree = u64();
    h.modulus = u64();
    h.base = i64();
    h.bound = f64();
    h.sd = f64();
    return h;
  }
  void expect(BlobKind kind) {
    const BlobHeader h = header();
    if (h != BlobHeader::of(*params_, kind)) {
      throw FormatError("blob header does not match the parameters");
    }
  }
  std::uint64_t count() {
    const auto k = u64();
    if (k > kMaxCount) throw FormatError("implausible element count");
    return k;
  }
  Poly poly() {
    const auto& ring = params_->ring;
    if (count() != ring->degree()) throw FormatError("polynomial length mismatch");
    std::vector<std::int64_t> c(ring->degree());
    const auto half = static_cast<std::int64_t>(ring->modulus() / 2);
    for (auto& x : c) {
      x = i64();
      if (x > half || x < -half) throw FormatError("coefficient out of range");
    }
    return Poly::from_coeffs(ring, c);
  }
  RlweCt ct() {
    Poly b = poly();
    Poly a = poly();
    return RlweCt{std::move(b), std::move(a)};
  }
  std::vector<RlweCt> cts() {
    std::vector<RlweCt> out(count());
    for (auto& c : out) c = ct();
    return out;
  }
  RgswCt gsw() {
    const auto k = count();
    if (k != 2 * static_cast<std::uint64_t>(params_->gadget.digits)) {
      throw FormatError("GSW column count mismatch");
    }
    std::vector<RlweCt> cols(k);
    for (auto& c : cols) c = ct();
    return RgswCt(params_->gadget, std::move(cols));
  }
  std::vector<RgswCt> gsws() {
    const auto k = count();
    std::vector<RgswCt> out;
    out.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) out.push_back(gsw());
    return out;
  }
  GswMatrix gsw_matrix() {
    GswMatrix m(count());
    for (auto& row : m) row = gsws();
    return m;
  }
  AutomorphismKeySet autokeys() {
    AutomorphismKeySet set;
    const auto k = count();
    for (std::uint64_t i = 0; i < k; ++i) {
      const auto theta = u64();
      set.insert(AutomorphismKey{theta, gsw()});
    }
    return set;
  }
  void finish() const {
    if (pos_ != in_.size()) throw FormatError("trailing bytes");
  }

 private:
  void need(std::size_t k) const {
    if (in_.size() - pos_ < k) throw FormatError("truncated blob");
  }
  std::uint64_t get(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_++]))
           << (8 * i);
    }
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
  const CryptoParams* params_;
};

template <typename F>
std::string write_blob(const CryptoParams& params, BlobKind kind, F body) {
  Writer w;
  w.header(BlobHeader::of(params, kind));
  body(w);
  return w.take();
}

template <typename F>
auto read_blob(std::string_view blob, const CryptoParams& params, BlobKind kind,
               F body) {
  Reader r(blob, &params);
  r.expect(kind);
  auto out = body(r);
  r.finish();
  return out;
}

}  // namespace

BlobHeader BlobHeader::of(const CryptoParams& params, BlobKind kind) {
  BlobHeader h;
  h.kind = kind;
  h.degree = params.degree();
  h.modulus = params.modulus();
  h.base = params.gadget.base();
  h.bound = params.dist.bound;
  h.sd = params.dist.sd;
  return h;
}

BlobHeader read_header(std::string_view blob) {
  return Reader(blob, nullptr).header();
}

CryptoParams params_from_header(const BlobHeader& h) {
  try {
    return CryptoParams::create(h.degree, h.modulus, h.base, h.sd, h.bound);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("header parameters invalid: ") + e.what());
  }
}

std::string serialize(const SecretKey& key, const CryptoParams& params) {
  return write_blob(params, BlobKind::kSecretKey,
                    [&](Writer& w) { w.poly(key.sk); });
}

std::string serialize(const RlweCt& c, const CryptoParams& params) {
  return write_blob(params, BlobKind::kCiphertext, [&](Writer& w) { w.ct(c); });
}

std::string serialize(const std::vector<RlweCt>& c, const CryptoParams& params) {
  return write_blob(params, BlobKind::kCiphertextVector,
                    [&](Writer& w) { w.cts(c); });
}

std::string serialize(const RgswCt& c, const CryptoParams& params) {
  return write_blob(params, BlobKind::kGsw, [&](Writer& w) { w.gsw(c); });
}

std::string serialize(const AutomorphismKeySet& keys,
                      const CryptoParams& params) {
  return write_blob(params, BlobKind::kAutomorphismKeys,
                    [&](Writer& w) { w.autokeys(keys); });
}

std::string serialize(const NaiveEvalKeys& keys, const CryptoParams& params) {
  return write_blob(params, BlobKind::kNaiveEval, [&](Writer& w) {
    w.gsw_matrix(keys.FG);
    w.gsw_matrix(keys.H);
  });
}

std::string serialize(const PackedEvalKeys& keys, const CryptoParams& params) {
  return write_blob(params, BlobKind::kPackedEval, [&](Writer& w) {
    w.u64(keys.layout.tau);
    w.u64(keys.outputs);
    w.gsws(keys.F);
    w.gsws(keys.G);
    w.gsws(keys.H);
    w.autokeys(keys.autokeys);
  });
}

SecretKey deserialize_secret_key(std::string_view blob,
                                 const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kSecretKey,
                   [](Reader& r) { return SecretKey{r.poly()}; });
}

RlweCt deserialize_ciphertext(std::string_view blob, const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kCiphertext,
                   [](Reader& r) { return r.ct(); });
}

std::vector<RlweCt> deserialize_ciphertexts(std::string_view blob,
                                            const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kCiphertextVector,
                   [](Reader& r) { return r.cts(); });
}

RgswCt deserialize_gsw(std::string_view blob, const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kGsw,
                   [](Reader& r) { return r.gsw(); });
}

AutomorphismKeySet deserialize_automorphism_keys(std::string_view blob,
                                                 const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kAutomorphismKeys,
                   [](Reader& r) { return r.autokeys(); });
}

NaiveEvalKeys deserialize_naive_eval(std::string_view blob,
                                     const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kNaiveEval, [](Reader& r) {
    NaiveEvalKeys k;
    k.FG = r.gsw_matrix();
    k.H = r.gsw_matrix();
    return k;
  });
}

PackedEvalKeys deserialize_packed_eval(std::string_view blob,
                                       const CryptoParams& params) {
  return read_blob(blob, params, BlobKind::kPackedEval, [&](Reader& r) {
    PackedEvalKeys k;
    const auto tau = r.count();
    try {
      k.layout = PackLayout::create(params.degree(), tau);
    } catch (const ParameterError& e) {
      throw FormatError(std::string("bad layout: ") + e.what());
    }
    k.outputs = r.count();
    k.F = r.gsws();
    k.G = r.gsws();
    k.H = r.gsws();
    k.autokeys = r.autokeys();
    return k;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("write failed for " + path);
}

}  // namespace encctl
