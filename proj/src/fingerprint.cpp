#include "editcraft/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "graph_scratch.hpp"

namespace editcraft {

namespace {

// splitmix64 finalizer; fixed in-repo so bit patterns are stable across
// platforms and runs. No parity with external toolkits is promised.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tuple(const std::vector<std::uint64_t>& items) {
  std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
  for (std::uint64_t v : items) {
    h = mix64(h ^ mix64(v));
  }
  return h;
}

}  // namespace

bool valid_fp_length(int nbits) {
  return nbits == 512 || nbits == 1024 || nbits == 2048 || nbits == 4096;
}

Fingerprint Fingerprint::zeros(int nbits, int radius) {
  Fingerprint fp;
  fp.length = nbits;
  fp.radius = radius;
  fp.words.assign(static_cast<std::size_t>(nbits) / 64, 0);
  return fp;
}

int Fingerprint::popcount() const {
  int n = 0;
  for (std::uint64_t w : words) n += std::popcount(w);
  return n;
}

std::string Fingerprint::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(static_cast<std::size_t>(length) / 4);
  for (int nib = 0; nib < length / 4; ++nib) {
    int v = 0;
    for (int k = 0; k < 4; ++k) {
      if (test(nib * 4 + k)) v |= 1 << k;
    }
    out.push_back(digits[v]);
  }
  return out;
}

Fingerprint Fingerprint::from_hex(const std::string& hex, int radius) {
  int nbits = static_cast<int>(hex.size()) * 4;
  if (!valid_fp_length(nbits)) {
    throw BadParameter("hex fingerprint has unsupported length " +
                       std::to_string(hex.size()));
  }
  Fingerprint fp = zeros(nbits, radius);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    char c = hex[i];
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw BadParameter(std::string("bad hex digit '") + c +
                         "' in fingerprint");
    }
    for (int k = 0; k < 4; ++k) {
      if (v & (1 << k)) fp.set(static_cast<int>(i) * 4 + k);
    }
  }
  return fp;
}

Fingerprint morgan_fingerprint(const Molecule& mol, int radius, int nbits) {
  if (!valid_fp_length(nbits)) {
    throw BadParameter("fingerprint length must be one of 512/1024/2048/4096");
  }
  if (radius < 0) throw BadParameter("fingerprint radius must be >= 0");

  Molecule k = kekulize(mol);
  internal::GraphView g(k);
  auto h = total_h_counts(k);
  auto bond_ring = internal::ring_bonds(g);
  auto atom_ring = internal::ring_atoms(g, bond_ring);

  int n = g.n();
  std::vector<std::uint64_t> id(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = k.atoms()[i];
    id[i] = hash_tuple({static_cast<std::uint64_t>(a.element),
                        static_cast<std::uint64_t>(a.formal_charge + 8),
                        static_cast<std::uint64_t>(g.adj[i].size()),
                        static_cast<std::uint64_t>(h[i]),
                        static_cast<std::uint64_t>(atom_ring[i] ? 1 : 0)});
  }

  Fingerprint fp = Fingerprint::zeros(nbits, radius);
  for (int i = 0; i < n; ++i) {
    fp.set(static_cast<int>(id[i] % static_cast<std::uint64_t>(nbits)));
  }

  // Grow environments; per level, candidates are deduplicated by the bond
  // set they cover (smallest id claims a set first, which keeps the choice
  // permutation independent).
  std::vector<std::set<int>> env(n);  // bonds within current radius
  std::set<std::set<int>> seen_sets;
  for (int level = 1; level <= radius; ++level) {
    std::vector<std::uint64_t> next(n);
    std::vector<std::set<int>> next_env(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> items;
      items.push_back(static_cast<std::uint64_t>(level));
      items.push_back(id[i]);
      std::vector<std::pair<int, std::uint64_t>> nbrs;
      for (const auto& e : g.adj[i]) {
        nbrs.push_back({static_cast<int>(k.bonds()[e.bond].order),
                        id[e.nbr]});
      }
      std::sort(nbrs.begin(), nbrs.end());
      for (auto [oc, nid] : nbrs) {
        items.push_back(static_cast<std::uint64_t>(oc));
        items.push_back(nid);
      }
      next[i] = hash_tuple(items);

      next_env[i] = env[i];
      for (const auto& e : g.adj[i]) {
        next_env[i].insert(e.bond);
        for (int b : env[e.nbr]) next_env[i].insert(b);
      }
    }

    // Emission with bond-set dedup, stable under atom reordering.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return next[x] < next[y]; });
    for (int i : order) {
      if (next_env[i] == env[i]) continue;  // neighborhood stopped growing
      if (seen_sets.count(next_env[i])) continue;
      seen_sets.insert(next_env[i]);
      fp.set(static_cast<int>(next[i] % static_cast<std::uint64_t>(nbits)));
    }
    id = std::move(next);
    env = std::move(next_env);
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.length != b.length) {
    throw LengthMismatch("fingerprint lengths differ: " +
                         std::to_string(a.length) + " vs " +
                         std::to_string(b.length));
  }
  long both = 0;
  long either = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i) {
    both += std::popcount(a.words[i] & b.words[i]);
    either += std::popcount(a.words[i] | b.words[i]);
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace editcraft
