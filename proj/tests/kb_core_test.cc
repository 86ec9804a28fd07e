#include <random>
#include <sstream>

#include "doctest.h"
#include "reifkb/errors.h"
#include "reifkb/kb.h"
#include "reifkb/kb_io.h"
#include "reifkb/sparse.h"
#include "reifkb/weighted_set.h"
#include "test_util.h"

using namespace reifkb;
using reifkb::testing::Cell;
using reifkb::testing::SmallGrid;

TEST_CASE("grid KB counts") {
  KnowledgeBase kb = SmallGrid(3);
  CHECK(kb.num_entities() == 9);
  CHECK(kb.num_relations() == 4);
  CHECK(kb.num_triples() == 24);
  CHECK(kb.IsHard());
  std::size_t total = 0;
  for (RelationId r = 0; r < 4; ++r) {
    CHECK(kb.RelationMatrix(r).nnz() == kb.RelationTripleCount(r));
    total += kb.RelationMatrix(r).nnz();
  }
  CHECK(total == kb.num_triples());
}

TEST_CASE("north relation matrix has 6 unit entries") {
  KnowledgeBase kb = SmallGrid(3);
  const CooMatrix& north = kb.RelationCoo(0);
  CHECK(north.nnz() == 6);
  for (const auto& e : north.entries()) {
    CHECK(e.value == 1.0);
    CHECK(e.col + 3 == e.row);
  }
}

TEST_CASE("empty triple list builds an empty KB") {
  Schema s;
  s.AddType("entity", 5);
  s.AddRelation("r", 0, 0);
  KnowledgeBase kb = KnowledgeBase::Build(s, {});
  CHECK(kb.num_triples() == 0);
  CHECK(kb.RelationMatrix(0).rows() == 5);
  CHECK(kb.RelationMatrix(0).nnz() == 0);
  Matrix y = SpMM(OneHot(5, 2), kb.RelationMatrix(0));
  CHECK(y == Matrix(1, 5));
}

TEST_CASE("duplicate triples merge by summing weights") {
  Schema s;
  s.AddType("entity", 3);
  s.AddRelation("r", 0, 0);
  std::vector<Triple> t = {{0, 0, 1, 0.4}, {2, 0, 2, 1.0}, {0, 0, 1, 0.6}};
  KnowledgeBase kb = KnowledgeBase::Build(s, t);
  REQUIRE(kb.num_triples() == 2);
  CHECK(kb.triples()[0].weight == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kb.triples()[1].subj == 2);
  CHECK(kb.RelationCoo(0).entries()[0].value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("soft weight stored verbatim") {
  Schema s;
  s.AddType("entity", 2);
  s.AddRelation("r", 0, 0);
  std::vector<Triple> t = {{0, 0, 1, 0.25}};
  KnowledgeBase kb = KnowledgeBase::Build(s, t);
  CHECK(kb.RelationCoo(0).entries()[0].value == 0.25);
  CHECK_FALSE(kb.IsHard());
}

TEST_CASE("KB build errors") {
  Schema s;
  s.AddType("entity", 3);
  s.AddRelation("r", 0, 0);
  SUBCASE("out of range entity names the triple") {
    std::vector<Triple> t = {{0, 0, 1}, {0, 0, 7}};
    try {
      KnowledgeBase::Build(s, t);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("triple 1") != std::string::npos);
    }
  }
  SUBCASE("unknown relation") {
    std::vector<Triple> t = {{0, 3, 1}};
    CHECK_THROWS_AS(KnowledgeBase::Build(s, t), SchemaError);
  }
  SUBCASE("negative weight") {
    std::vector<Triple> t = {{0, 0, 1, -0.5}};
    CHECK_THROWS_AS(KnowledgeBase::Build(s, t), ValidationError);
  }
  SUBCASE("nan weight") {
    std::vector<Triple> t = {{0, 0, 1, std::nan("")}};
    CHECK_THROWS_AS(KnowledgeBase::Build(s, t), ValidationError);
  }
  SUBCASE("unknown relation lookup") {
    KnowledgeBase kb = KnowledgeBase::Build(s, {});
    CHECK_THROWS_AS(kb.RelationMatrix(1), LookupError);
  }
}

TEST_CASE("schema validation") {
  Schema s;
  CHECK_THROWS_AS(s.AddType("t", std::size_t{0}), SchemaError);
  s.AddType("t", 2);
  CHECK_THROWS_AS(s.AddType("t", 2), SchemaError);
  CHECK_THROWS_AS(s.AddType("u", std::vector<std::string>{"a", "a"}), SchemaError);
  CHECK_THROWS_AS(s.AddRelation("r", 0, 4), SchemaError);
  CHECK_THROWS_AS(s.AddRelation("r", "t", "nope"), SchemaError);
  s.AddRelation("r", "t", "t");
  CHECK_THROWS_AS(s.AddRelation("r", 0, 0), SchemaError);
  CHECK(s.EntityName(0, 1) == "t_1");
  CHECK(s.EntityIndex(0, "t_1") == 1);
  CHECK_THROWS_AS(s.EntityIndex(0, "zz"), LookupError);
}

TEST_CASE("SpMM single-edge and linearity examples") {
  KnowledgeBase kb = SmallGrid(3);
  const SparseMatrix& north = kb.RelationMatrix(0);
  Matrix y = SpMM(OneHot(9, Cell(3, 1, 1)), north);
  CHECK(y == OneHot(9, Cell(3, 0, 1)));
  CHECK(SpMM(Matrix(1, 9), north) == Matrix(1, 9));
  Matrix x(1, 9);
  x(0, Cell(3, 1, 1)) = 0.5;
  x(0, Cell(3, 1, 2)) = 0.5;
  Matrix expected(1, 9);
  expected(0, Cell(3, 0, 1)) = 0.5;
  expected(0, Cell(3, 0, 2)) = 0.5;
  CHECK(SpMM(x, north) == expected);
  CHECK_THROWS_AS(SpMM(Matrix(1, 8), north), ShapeError);
}

TEST_CASE("SpMM matches a brute-force dense product") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    std::size_t rows = dim(rng), cols = dim(rng), nnz = dim(rng) * 3;
    std::uniform_int_distribution<Index> pr(0, rows - 1), pc(0, cols - 1);
    std::uniform_real_distribution<double> w(0.0, 2.0);
    std::vector<CooEntry> entries;
    for (std::size_t i = 0; i < nnz; ++i) entries.push_back({pr(rng), pc(rng), w(rng)});
    CooMatrix coo = CooMatrix::FromEntries(rows, cols, entries);
    SparseMatrix m(coo);
    for (bool transpose : {false, true}) {
      std::size_t in = transpose ? cols : rows;
      Matrix x = testing::RandomSigned(rng, 4, in);
      Matrix fast = SpMM(x, m, transpose);
      Matrix ref = SpMMCoo(x, coo, transpose);
      CHECK(fast == ref);
      CHECK(MaxAbsDiff(fast, testing::DenseOracleProduct(x, coo, transpose)) <= 1e-12);
    }
  }
}

TEST_CASE("COO to CSR round trip and transpose") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<Index> p(0, 19);
    std::vector<CooEntry> entries;
    for (int i = 0; i < 60; ++i) entries.push_back({p(rng), p(rng), 1.0 + i});
    CooMatrix coo = CooMatrix::FromEntries(20, 20, entries);
    CsrMatrix csr = CsrMatrix::FromCoo(coo);
    CHECK(csr.ToCoo() == coo);
    for (std::size_t r = 0; r + 1 < csr.row_ptr().size(); ++r) {
      CHECK(csr.row_ptr()[r] <= csr.row_ptr()[r + 1]);
      for (std::size_t i = csr.row_ptr()[r] + 1; i < csr.row_ptr()[r + 1]; ++i)
        CHECK(csr.col_idx()[i - 1] < csr.col_idx()[i]);
    }
    CHECK(csr.Transposed().Transposed().ToCoo() == coo);
  }
}

TEST_CASE("COO validation and SparseAdd") {
  CHECK_THROWS_AS(CooMatrix::FromEntries(2, 2, {{2, 0, 1.0}}), SchemaError);
  CHECK_THROWS_AS(CooMatrix::FromEntries(2, 2, {{0, 0, -1.0}}), ValidationError);
  CooMatrix a = CooMatrix::FromEntries(2, 2, {{0, 0, 1.0}, {1, 1, 2.0}});
  CooMatrix b = CooMatrix::FromEntries(2, 2, {{0, 0, 3.0}, {0, 1, 4.0}});
  CooMatrix c = SparseAdd(a, b, 0.5);
  REQUIRE(c.nnz() == 3);
  CHECK(c.entries()[0] == CooEntry{0, 0, 2.5});
  CHECK(c.entries()[1] == CooEntry{0, 1, 2.0});
  CHECK(c.entries()[2] == CooEntry{1, 1, 2.0});
  CHECK(SparseAdd(a, b, 0.0) == a);
}

TEST_CASE("k-hot encode and support decode") {
  Schema s;
  s.AddType("person", std::vector<std::string>{"Quentin_Tarantino", "Uma_Thurman", "x"});
  SetSpace space{SetSpace::Kind::kEntities, 0};
  WeightedSet w = KHotEncode(s, space, {{"Quentin_Tarantino", 1.0}});
  CHECK(w.values == OneHot(3, 0));
  CHECK(SupportDecodeNames(s, space, w.values.row(0)) == NamedWeights{{"Quentin_Tarantino", 1.0}});
  CHECK(KHotEncode(s, space, {}).values == Matrix(1, 3));
  CHECK_THROWS_AS(KHotEncode(s, space, {{"nobody", 1.0}}), LookupError);
  CHECK_THROWS_AS(KHotEncode(s, space, {{"x", -1.0}}), ValidationError);

  std::vector<double> v(5, 0.0);
  v[3] = 1e-12;
  auto support = SupportDecode(v);
  REQUIRE(support.size() == 1);
  CHECK(support[0].first == 3);
  CHECK(SupportDecode(v, 1e-12).empty());
}

TEST_CASE("relation sets live in relation space") {
  KnowledgeBase kb = SmallGrid(3);
  SetSpace rel{SetSpace::Kind::kRelations, 0};
  CHECK(SpaceDim(kb.schema(), rel) == 4);
  WeightedSet r = KHotEncode(kb.schema(), rel, {{"north", 0.5}, {"east", 0.5}});
  CHECK(r.values(0, 0) == 0.5);
  CHECK(r.values(0, 2) == 0.5);
}

TEST_CASE("TSV and schema round trip") {
  Schema s;
  s.AddType("person", std::vector<std::string>{"ann", "bob"});
  s.AddType("city", std::vector<std::string>{"paris", "rome", "oslo"});
  s.AddRelation("lives_in", "person", "city");
  s.AddRelation("knows", "person", "person");
  std::vector<Triple> t = {{0, 0, 1, 1.0}, {1, 1, 0, 0.3}, {1, 0, 2, 1.0}};
  KnowledgeBase kb = KnowledgeBase::Build(s, t);
  std::stringstream tsv, schema;
  WriteTriplesTsv(kb, tsv);
  WriteSchema(kb.schema(), schema);
  KnowledgeBase back = ParseKnowledgeBase(tsv, &schema);
  CHECK(back.schema() == kb.schema());
  CHECK(back.triples() == kb.triples());
  CHECK(back.fingerprint() == kb.fingerprint());
}

TEST_CASE("TSV without schema and with AUTO types") {
  std::stringstream tsv("# comment\na\tr\tb\nb\tr\tc\t0.5\n\nc\ts\ta\n");
  KnowledgeBase kb = ParseKnowledgeBase(tsv, nullptr);
  CHECK(kb.num_entities() == 3);
  CHECK(kb.num_relations() == 2);
  CHECK(kb.triples()[1].weight == 0.5);
  CHECK(kb.schema().EntityIndex(0, "c") == 2);

  std::stringstream tsv2("a\tr\tb\n");
  std::stringstream schema("type entity 4\nentity entity b\nrel r entity entity\n");
  KnowledgeBase kb2 = ParseKnowledgeBase(tsv2, &schema);
  CHECK(kb2.num_entities() == 4);
  CHECK(kb2.schema().EntityIndex(0, "b") == 0);
  CHECK(kb2.schema().EntityIndex(0, "a") == 1);

  std::stringstream bad("a\tr\n");
  CHECK_THROWS_AS(ParseKnowledgeBase(bad, nullptr), ConfigError);
  std::stringstream bad_weight("a\tr\tb\t-1\n");
  CHECK_THROWS_AS(ParseKnowledgeBase(bad_weight, nullptr), ValidationError);
}

TEST_CASE("fingerprint tracks content") {
  KnowledgeBase a = SmallGrid(3);
  KnowledgeBase b = SmallGrid(3);
  KnowledgeBase c = SmallGrid(4);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("signature view keeps one signature") {
  Schema s;
  s.AddType("e", 3);
  s.AddType("cvt", 2);
  s.AddRelation("ee", "e", "e");
  s.AddRelation("ec", "e", "cvt");
  s.AddRelation("ce", "cvt", "e");
  s.AddRelation("ee2", "e", "e");
  std::vector<Triple> t = {{0, 0, 1}, {0, 1, 1}, {1, 2, 2}, {2, 3, 0}};
  KnowledgeBase kb = KnowledgeBase::Build(s, t);
  CHECK_FALSE(kb.TypeCompatible());
  CHECK_THROWS_AS(kb.FollowInputDim(), SchemaError);
  KnowledgeBase ee = kb.SignatureView(0, 0);
  CHECK(ee.num_relations() == 2);
  CHECK(ee.num_triples() == 2);
  CHECK(ee.schema().relation(1).name == "ee2");
  KnowledgeBase ec = kb.SignatureView(0, 1);
  CHECK(ec.FollowInputDim() == 3);
  CHECK(ec.FollowOutputDim() == 2);
}
