#ifndef REIFKB_KB_IO_H_
#define REIFKB_KB_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "reifkb/kb.h"

namespace reifkb {

// Triple file: UTF-8 TSV, `subject<TAB>relation<TAB>object[<TAB>weight]`,
// weight defaulting to 1.0, '#' lines are comments.
//
// Schema file, one declaration per line:
//   type <name> <cardinality|AUTO>
//   entity <type> <name>          (optional; fixes the index order of names)
//   rel <name> <subject-type> <object-type>
//
// Entities named in `entity` lines get the lowest indices in declaration
// order; other names are indexed in order of first appearance in the triple
// file. A numeric cardinality pads the type with "<type>_<i>" names; AUTO
// uses exactly the observed names. Without a schema, the KB has a single
// type "entity" and relations in order of first appearance.
KnowledgeBase ParseKnowledgeBase(std::istream& triples, std::istream* schema);
KnowledgeBase LoadKnowledgeBase(const std::filesystem::path& triples_path,
                                const std::optional<std::filesystem::path>& schema_path);

void WriteTriplesTsv(const KnowledgeBase& kb, std::ostream& out);
void WriteSchema(const Schema& schema, std::ostream& out);
void SaveKnowledgeBase(const KnowledgeBase& kb, const std::filesystem::path& triples_path,
                       const std::filesystem::path& schema_path);

// Shortest round-trip decimal form of a double.
std::string FormatDouble(double v);

}  // namespace reifkb

#endif  // REIFKB_KB_IO_H_
