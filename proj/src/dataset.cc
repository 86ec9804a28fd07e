#include "reifkb/dataset.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "reifkb/errors.h"
#include "reifkb/hash.h"

namespace reifkb {

namespace {

using nlohmann::json;

std::ofstream OpenOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

template <typename Fn>
void ForEachJsonLine(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in = OpenIn(path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

}  // namespace

void WriteExamples(const std::vector<Example>& examples, const std::filesystem::path& path) {
  std::ofstream out = OpenOut(path);
  for (const Example& e : examples) {
    json j = {{"tokens", e.tokens}, {"seeds", e.seeds}, {"answers", e.answers}, {"hops", e.hops}};
    out << j.dump() << '\n';
  }
}

std::vector<Example> ReadExamples(const std::filesystem::path& path) {
  std::vector<Example> out;
  ForEachJsonLine(path, [&](const json& j) {
    Example e;
    j.at("tokens").get_to(e.tokens);
    j.at("seeds").get_to(e.seeds);
    j.at("answers").get_to(e.answers);
    if (j.contains("hops")) j.at("hops").get_to(e.hops);
    out.push_back(std::move(e));
  });
  return out;
}

void WriteVocab(const std::vector<std::string>& vocab, const std::filesystem::path& path) {
  std::ofstream out = OpenOut(path);
  for (const std::string& t : vocab) out << t << '\n';
}

std::vector<std::string> ReadVocab(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) vocab.push_back(line);
  return vocab;
}

void WriteKbcQueries(const std::vector<KbcQuery>& queries, const std::filesystem::path& path) {
  std::ofstream out = OpenOut(path);
  for (const KbcQuery& q : queries) {
    json j = {{"rel", q.rel}, {"head", q.head}, {"tails", q.tails}};
    out << j.dump() << '\n';
  }
}

std::vector<KbcQuery> ReadKbcQueries(const std::filesystem::path& path) {
  std::vector<KbcQuery> out;
  ForEachJsonLine(path, [&](const json& j) {
    KbcQuery q;
    j.at("rel").get_to(q.rel);
    j.at("head").get_to(q.head);
    j.at("tails").get_to(q.tails);
    out.push_back(std::move(q));
  });
  return out;
}

std::vector<Example> KbcExamples(const KnowledgeBase& kb, const std::vector<KbcQuery>& queries) {
  const Schema& schema = kb.schema();
  if (schema.num_types() != 1) throw SchemaError("KB completion expects a single-type KB");
  std::vector<Example> out;
  out.reserve(queries.size());
  for (const KbcQuery& q : queries) {
    Example e;
    e.tokens = {schema.RelationIndex(q.rel)};
    e.seeds = {schema.EntityIndex(0, q.head)};
    for (const std::string& t : q.tails) e.answers.push_back(schema.EntityIndex(0, t));
    out.push_back(std::move(e));
  }
  return out;
}

std::string FileDigest(const std::filesystem::path& path) {
  return HexDigest(HashString(ReadTextFile(path)));
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = OpenOut(path);
  out << text;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace reifkb
