#include "lops/atom.hpp"

#include <cctype>
#include <deque>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace lops {

std::string Atom::text() const { return index ? name + std::to_string(*index) : name; }

namespace {

struct Registry {
  std::mutex mutex;
  std::deque<Atom> atoms;
  std::unordered_map<std::string, AtomId> by_text;

  Registry() {
    for (int i = 0; i < 4; ++i) add(Atom{"xi", AtomKind::covector, i});
  }

  AtomId add(const Atom& atom) {
    const std::string key = atom.text();
    if (auto it = by_text.find(key); it != by_text.end()) {
      if (!(atoms[it->second] == atom))
        throw std::invalid_argument("atom text '" + key + "' already names a different atom");
      return it->second;
    }
    if (atoms.size() >= std::numeric_limits<AtomId>::max())
      throw std::length_error("atom universe exhausted");
    atoms.push_back(atom);
    const auto id = static_cast<AtomId>(atoms.size() - 1);
    by_text.emplace(key, id);
    return id;
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

AtomId intern(const Atom& atom) {
  if (atom.kind == AtomKind::covector && (atom.name != "xi" || !atom.index || *atom.index < 0 || *atom.index > 3))
    throw std::invalid_argument("covector atoms are exactly xi0..xi3");
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.add(atom);
}

const Atom& atom_of(AtomId id) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.atoms.at(id);
}

std::size_t atom_count() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.atoms.size();
}

AtomId xi(int component) {
  if (component < 0 || component > 3) throw std::out_of_range("xi component must be 0..3");
  return static_cast<AtomId>(component);
}

AtomId param(std::string_view name) {
  if (name.size() == 3 && name.substr(0, 2) == "xi" && name[2] >= '0' && name[2] <= '3')
    return xi(name[2] - '0');
  return intern(Atom{std::string(name), AtomKind::parameter, std::nullopt});
}

std::optional<AtomId> find_atom(std::string_view text) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  if (auto it = r.by_text.find(std::string(text)); it != r.by_text.end()) return it->second;
  return std::nullopt;
}

const std::vector<AtomId>& xi_atoms() {
  static const std::vector<AtomId> ids{0, 1, 2, 3};
  return ids;
}

}  // namespace lops
