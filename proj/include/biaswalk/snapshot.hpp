#pragma once

/// @file snapshot.hpp
/// Binary graph snapshot (`graph.bin`).
///
/// Layout, all integers little-endian:
///
///     magic     8 bytes  "BIASWALK"
///     version   u32      snapshot_version
///     symbols   u64 count, then count x string
///     nodes     u64 count, then per node:
///                 u8 kind, string name,
///                 [kind == literal: string lexical, u8 has_datatype,
///                  string datatype, string language]
///                 u32 type count, then that many u32 symbol ids
///     edges     u64 count, then count x (u32 start, u32 label, u32 end)
///
/// A string is a u32 byte length followed by the bytes.
/// Loading reproduces node, symbol and edge ids exactly.

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "biaswalk/error.hpp"
#include "biaswalk/graph.hpp"

namespace biaswalk {

inline constexpr std::array<char, 8> snapshot_magic{'B', 'I', 'A', 'S', 'W', 'A', 'L', 'K'};
inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(value) >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

inline void put_string(std::ostream& out, std::string_view s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error(Stage::ingest, "graph snapshot is truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

inline std::string get_string(std::istream& in) {
  const auto n = get_le<std::uint32_t>(in);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw Error(Stage::ingest, "graph snapshot is truncated");
  return s;
}

}  // namespace detail

inline void save_snapshot(const PropertyGraph& g, std::ostream& out) {
  out.write(snapshot_magic.data(), snapshot_magic.size());
  detail::put_le<std::uint32_t>(out, snapshot_version);

  detail::put_le<std::uint64_t>(out, g.symbol_count());
  for (LabelId s = 0; s < g.symbol_count(); ++s) detail::put_string(out, g.symbol(s));

  detail::put_le<std::uint64_t>(out, g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    const NodeId n{i};
    detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(g.kind(n)));
    detail::put_string(out, g.name(n));
    if (const Literal* lit = g.literal(n)) {
      detail::put_string(out, lit->lexical);
      detail::put_le<std::uint8_t>(out, lit->datatype ? 1 : 0);
      detail::put_string(out, lit->datatype.value_or(""));
      detail::put_string(out, lit->language);
    }
    const auto types = g.types(n);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(types.size()));
    for (const LabelId t : types) detail::put_le<std::uint32_t>(out, t);
  }

  detail::put_le<std::uint64_t>(out, g.edge_count());
  for (const auto& e : g.edges()) {
    detail::put_le<std::uint32_t>(out, e.start.value);
    detail::put_le<std::uint32_t>(out, e.label);
    detail::put_le<std::uint32_t>(out, e.end.value);
  }
  if (!out) throw Error(Stage::ingest, "failed to write graph snapshot");
}

inline PropertyGraph load_snapshot(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != snapshot_magic)
    throw Error(Stage::ingest, "not a graph snapshot (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != snapshot_version)
    throw Error(Stage::ingest, "unsupported graph snapshot version " + std::to_string(version));

  GraphBuilder b;
  const auto symbols = detail::get_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < symbols; ++i) {
    const std::string s = detail::get_string(in);
    if (b.intern_symbol(s) != i) throw Error(Stage::ingest, "graph snapshot has duplicate symbols");
  }

  const auto nodes = detail::get_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < nodes; ++i) {
    const auto kind = detail::get_le<std::uint8_t>(in);
    std::string name = detail::get_string(in);
    NodeId id;
    if (kind == static_cast<std::uint8_t>(NodeKind::literal)) {
      Literal lit;
      lit.lexical = detail::get_string(in);
      const bool has_dt = detail::get_le<std::uint8_t>(in) != 0;
      std::string dt = detail::get_string(in);
      if (has_dt) lit.datatype = std::move(dt);
      lit.language = detail::get_string(in);
      id = b.add_literal_node(lit);
    } else if (kind == static_cast<std::uint8_t>(NodeKind::iri)) {
      id = b.add_node(name);
    } else {
      throw Error(Stage::ingest, "graph snapshot has unknown node kind");
    }
    if (id.value != i) throw Error(Stage::ingest, "graph snapshot has duplicate nodes");
    const auto ntypes = detail::get_le<std::uint32_t>(in);
    for (std::uint32_t t = 0; t < ntypes; ++t) {
      const auto sym = detail::get_le<std::uint32_t>(in);
      if (sym >= symbols) throw Error(Stage::ingest, "graph snapshot type id out of range");
      b.add_type(id, LabelId{sym});
    }
  }

  const auto edges = detail::get_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < edges; ++i) {
    const auto s = detail::get_le<std::uint32_t>(in);
    const auto l = detail::get_le<std::uint32_t>(in);
    const auto e = detail::get_le<std::uint32_t>(in);
    if (s >= nodes || e >= nodes || l >= symbols) throw Error(Stage::ingest, "graph snapshot edge out of range");
    b.add_edge(NodeId{s}, l, NodeId{e});
  }
  return std::move(b).build();
}

}  // namespace biaswalk
