#include "reifkb/kb_io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "reifkb/errors.h"

namespace reifkb {

namespace {

std::vector<std::string> SplitWhitespace(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool SkipLine(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t first = line.find_first_not_of(" \t");
  return first == std::string::npos || line[first] == '#';
}

double ParseWeight(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad weight '" + s + "'");
  }
  return v;
}

struct TypeBuilder {
  std::string name;
  std::optional<std::size_t> cardinality;  // nullopt = AUTO
  std::vector<std::string> names;
  std::unordered_map<std::string, Index> index;

  Index Intern(const std::string& entity) {
    auto [it, inserted] = index.emplace(entity, static_cast<Index>(names.size()));
    if (inserted) names.push_back(entity);
    return it->second;
  }
};

struct RelBuilder {
  std::string name;
  std::size_t subject_type;
  std::size_t object_type;
};

struct RawTriple {
  std::string subj, rel, obj;
  double weight;
  std::size_t line;
};

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

KnowledgeBase ParseKnowledgeBase(std::istream& triples, std::istream* schema) {
  std::vector<TypeBuilder> types;
  std::unordered_map<std::string, std::size_t> type_ids;
  std::vector<RelBuilder> rels;
  std::unordered_map<std::string, std::size_t> rel_ids;

  std::string line;
  std::size_t line_no = 0;
  if (schema != nullptr) {
    while (std::getline(*schema, line)) {
      ++line_no;
      if (SkipLine(line)) continue;
      auto tok = SplitWhitespace(line);
      auto where = "schema line " + std::to_string(line_no);
      if (tok[0] == "type" && tok.size() == 3) {
        if (type_ids.count(tok[1])) throw ConfigError(where + ": duplicate type '" + tok[1] + "'");
        TypeBuilder t{tok[1], std::nullopt, {}, {}};
        if (tok[2] != "AUTO") {
          std::size_t n = 0;
          auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), n);
          if (ec != std::errc() || ptr != tok[2].data() + tok[2].size() || n == 0) {
            throw ConfigError(where + ": cardinality must be a positive integer or AUTO");
          }
          t.cardinality = n;
        }
        type_ids.emplace(t.name, types.size());
        types.push_back(std::move(t));
      } else if (tok[0] == "entity" && tok.size() == 3) {
        auto it = type_ids.find(tok[1]);
        if (it == type_ids.end()) throw ConfigError(where + ": unknown type '" + tok[1] + "'");
        types[it->second].Intern(tok[2]);
      } else if (tok[0] == "rel" && tok.size() == 4) {
        auto s = type_ids.find(tok[2]);
        auto o = type_ids.find(tok[3]);
        if (s == type_ids.end() || o == type_ids.end()) {
          throw ConfigError(where + ": relation '" + tok[1] + "' uses an undeclared type");
        }
        if (rel_ids.count(tok[1])) throw ConfigError(where + ": duplicate relation '" + tok[1] + "'");
        rel_ids.emplace(tok[1], rels.size());
        rels.push_back({tok[1], s->second, o->second});
      } else {
        throw ConfigError(where + ": expected 'type', 'entity' or 'rel' declaration");
      }
    }
  } else {
    types.push_back({"entity", std::nullopt, {}, {}});
    type_ids.emplace("entity", 0);
  }

  std::vector<RawTriple> raw;
  line_no = 0;
  while (std::getline(triples, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    auto f = SplitTabs(line);
    if (f.size() != 3 && f.size() != 4) {
      throw ConfigError("triple line " + std::to_string(line_no) +
                        ": expected subject<TAB>relation<TAB>object[<TAB>weight]");
    }
    double w = f.size() == 4 ? ParseWeight(f[3], line_no) : 1.0;
    raw.push_back({f[0], f[1], f[2], w, line_no});
  }

  for (const RawTriple& t : raw) {
    auto it = rel_ids.find(t.rel);
    if (it == rel_ids.end()) {
      if (schema != nullptr) {
        throw SchemaError("triple line " + std::to_string(t.line) + ": undeclared relation '" +
                          t.rel + "'");
      }
      it = rel_ids.emplace(t.rel, rels.size()).first;
      rels.push_back({t.rel, 0, 0});
    }
    const RelBuilder& r = rels[it->second];
    types[r.subject_type].Intern(t.subj);
    types[r.object_type].Intern(t.obj);
  }

  Schema out;
  for (TypeBuilder& t : types) {
    if (t.cardinality) {
      if (t.names.size() > *t.cardinality) {
        throw SchemaError("type '" + t.name + "' declares " + std::to_string(*t.cardinality) +
                          " entities but " + std::to_string(t.names.size()) + " are used");
      }
      for (std::size_t i = t.names.size(); i < *t.cardinality; ++i) {
        std::string pad = t.name + "_" + std::to_string(i);
        if (t.index.count(pad)) throw SchemaError("padding name '" + pad + "' already in use");
        t.Intern(pad);
      }
    }
    if (t.names.empty()) throw SchemaError("type '" + t.name + "' has no entities");
    out.AddType(t.name, t.names);
  }
  for (const RelBuilder& r : rels) {
    out.AddRelation(r.name, static_cast<TypeId>(r.subject_type), static_cast<TypeId>(r.object_type));
  }

  std::vector<Triple> parsed;
  parsed.reserve(raw.size());
  for (const RawTriple& t : raw) {
    const RelBuilder& r = rels[rel_ids.at(t.rel)];
    parsed.push_back({types[r.subject_type].index.at(t.subj),
                      static_cast<RelationId>(rel_ids.at(t.rel)),
                      types[r.object_type].index.at(t.obj), t.weight});
  }
  return KnowledgeBase::Build(std::move(out), parsed);
}

KnowledgeBase LoadKnowledgeBase(const std::filesystem::path& triples_path,
                                const std::optional<std::filesystem::path>& schema_path) {
  std::ifstream triples(triples_path);
  if (!triples) throw ConfigError("cannot open triple file " + triples_path.string());
  if (schema_path) {
    std::ifstream schema(*schema_path);
    if (!schema) throw ConfigError("cannot open schema file " + schema_path->string());
    return ParseKnowledgeBase(triples, &schema);
  }
  return ParseKnowledgeBase(triples, nullptr);
}

void WriteTriplesTsv(const KnowledgeBase& kb, std::ostream& out) {
  const Schema& s = kb.schema();
  for (const Triple& t : kb.triples()) {
    const RelationDecl& r = s.relation(t.rel);
    out << s.EntityName(r.subject_type, t.subj) << '\t' << r.name << '\t'
        << s.EntityName(r.object_type, t.obj);
    if (t.weight != 1.0) out << '\t' << FormatDouble(t.weight);
    out << '\n';
  }
}

void WriteSchema(const Schema& schema, std::ostream& out) {
  for (TypeId t = 0; t < schema.num_types(); ++t) {
    const EntityType& type = schema.type(t);
    out << "type " << type.name << ' ' << type.cardinality() << '\n';
  }
  for (TypeId t = 0; t < schema.num_types(); ++t) {
    const EntityType& type = schema.type(t);
    for (const std::string& name : type.entity_names) {
      out << "entity " << type.name << ' ' << name << '\n';
    }
  }
  for (const RelationDecl& r : schema.relations()) {
    out << "rel " << r.name << ' ' << schema.type(r.subject_type).name << ' '
        << schema.type(r.object_type).name << '\n';
  }
}

void SaveKnowledgeBase(const KnowledgeBase& kb, const std::filesystem::path& triples_path,
                       const std::filesystem::path& schema_path) {
  std::ofstream t(triples_path, std::ios::binary);
  std::ofstream s(schema_path, std::ios::binary);
  if (!t || !s) throw ConfigError("cannot write knowledge base to " + triples_path.string());
  WriteTriplesTsv(kb, t);
  WriteSchema(kb.schema(), s);
}

}  // namespace reifkb
