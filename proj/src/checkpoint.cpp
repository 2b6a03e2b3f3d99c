#include "vepsim/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "vepsim/error.hpp"

namespace vepsim {

namespace {

constexpr std::array<char, 8> kMagic{'V', 'E', 'P', 'S', 'I', 'M', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_field(std::ostream& out, const ScalarField& f) {
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  template <class T>
  T get() {
    T v{};
    raw(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }
  std::string get_string() {
    const auto len = get<std::uint64_t>();
    if (len > (1ULL << 30)) throw IoError(name_ + ": implausible string length");
    std::string s(len, '\0');
    raw(s.data(), len);
    return s;
  }
  ScalarField get_field(std::uint64_t n) {
    ScalarField f(static_cast<int>(n));
    raw(reinterpret_cast<char*>(f.values.data()), n * sizeof(double));
    return f;
  }

 private:
  void raw(char* dst, size_t bytes) {
    in_.read(dst, static_cast<std::streamsize>(bytes));
    if (static_cast<size_t>(in_.gcount()) != bytes) throw IoError(name_ + ": truncated checkpoint");
  }
  std::istream& in_;
  std::string name_;
};

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(kMagic.data(), kMagic.size());
    put(out, kVersion);
    put<std::int64_t>(out, ck.step);
    put(out, ck.t);
    const FieldSet& f = ck.fields;
    const std::uint64_t n = static_cast<std::uint64_t>(f.phi.size());
    put(out, n);
    for (const ScalarField* s : {&f.phi, &f.q, &f.mu, &f.p, &f.u.x, &f.u.y, &f.C.xx, &f.C.xy, &f.C.yy}) {
      if (static_cast<std::uint64_t>(s->size()) != n) throw IoError("checkpoint: inconsistent field sizes");
      put_field(out, *s);
    }
    const DiagnosticCarry& c = ck.carry;
    for (double v : {c.mass0, c.e_tot0, c.e_prev, c.e_alg0, c.source_acc, c.max_positive_dE,
                     c.positive_excursion}) {
      put(out, v);
    }
    put_string(out, ck.rng_state);
    put_string(out, ck.config_text);
    put(out, fnv1a(ck.config_text));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  Reader r(in, path.string());
  std::array<char, 8> magic{};
  for (char& ch : magic) ch = r.get<char>();
  if (magic != kMagic) throw IoError(path.string() + ": not a vepsim checkpoint");
  if (r.get<std::uint32_t>() != kVersion) throw IoError(path.string() + ": unsupported version");
  Checkpoint ck;
  ck.step = static_cast<int>(r.get<std::int64_t>());
  ck.t = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  if (n > (1ULL << 28)) throw IoError(path.string() + ": implausible node count");
  FieldSet& f = ck.fields;
  for (ScalarField* s : {&f.phi, &f.q, &f.mu, &f.p, &f.u.x, &f.u.y, &f.C.xx, &f.C.xy, &f.C.yy}) {
    *s = r.get_field(n);
  }
  DiagnosticCarry& c = ck.carry;
  for (double* v : {&c.mass0, &c.e_tot0, &c.e_prev, &c.e_alg0, &c.source_acc, &c.max_positive_dE,
                    &c.positive_excursion}) {
    *v = r.get<double>();
  }
  ck.rng_state = r.get_string();
  ck.config_text = r.get_string();
  ck.config_hash = r.get<std::uint64_t>();
  if (ck.config_hash != fnv1a(ck.config_text)) {
    throw IoError(path.string() + ": configuration hash mismatch");
  }
  return ck;
}

}  // namespace vepsim
