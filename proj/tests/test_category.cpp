#include <doctest.h>

#include "segquery/category.hpp"
#include "segquery/errors.hpp"

using namespace segquery;

namespace {

CategoryTable pascal_table() {
    return CategoryTable::from_entries({
        {3, "person", {}},
        {7, "television", {"tv monitor", "tv"}},
        {9, "potted plant", {"plant"}},
    });
}

}  // namespace

TEST_SUITE("category") {

TEST_CASE("normalize_name lowercases, trims, and collapses whitespace") {
    CHECK(normalize_name("  Traffic   Light ") == "traffic light");
    CHECK(normalize_name("cat") == "cat");
    CHECK(normalize_name("SKY\t") == "sky");
    CHECK(normalize_name("") == "");
    CHECK(normalize_name(" \t\n ") == "");
    CHECK(normalize_name(normalize_name("  Traffic   Light ")) ==
          normalize_name("  Traffic   Light "));
}

TEST_CASE("resolve: exact beats alias beats none") {
    CategoryTable table = pascal_table();

    auto exact = table.resolve("person");
    REQUIRE(exact.id.has_value());
    CHECK(*exact.id == 3);
    CHECK(exact.kind == MatchKind::Exact);

    auto alias = table.resolve("tv monitor");
    REQUIRE(alias.id.has_value());
    CHECK(*alias.id == 7);
    CHECK(alias.kind == MatchKind::Alias);

    auto none = table.resolve("unicorn");
    CHECK_FALSE(none.id.has_value());
    CHECK(none.kind == MatchKind::None);

    CHECK(table.resolve("  PERSON ").id == table.resolve("person").id);
    CHECK_FALSE(table.resolve("").id.has_value());
}

TEST_CASE("lookup helpers") {
    CategoryTable table = pascal_table();
    CHECK(table.size() == 3);
    CHECK(table.name_of(7) == "television");
    CHECK(table.find_by_id(9)->name == "potted plant");
    CHECK(table.find_by_id(1) == nullptr);
    CHECK(table.canonical_index(3).value() == 0);
    CHECK(table.canonical_index(9).value() == 2);
    CHECK_FALSE(table.canonical_index(1).has_value());
    CHECK_THROWS_AS((void)table.name_of(1), ValidationError);
}

TEST_CASE("ingestion rejects invalid tables with named diagnostics") {
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "a", {}}, {1, "b", {}}}),
                         doctest::Contains("duplicate category id 1"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{65535, "a", {}}}),
                         doctest::Contains("65535"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "  ", {}}}),
                         doctest::Contains("empty"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "Sky", {}}, {2, " sky ", {}}}),
                         doctest::Contains("duplicate canonical name 'sky'"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "a", {"shared"}}, {2, "b", {"shared"}}}),
                         doctest::Contains("alias 'shared'"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "a", {}}, {2, "b", {"a"}}}),
                         doctest::Contains("collides with canonical name"), ValidationError);
}

TEST_CASE("grammar-unsafe names are refused") {
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "sky, ground", {}}}),
                         doctest::Contains("','"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "top <SEG> hat", {}}}),
                         doctest::Contains("<seg>"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "neg<NEG>", {}}}),
                         doctest::Contains("<neg>"), ValidationError);
    CHECK_THROWS_WITH_AS(CategoryTable::from_entries({{1, "x", {"an <IMAGE> alias"}}}),
                         doctest::Contains("<image>"), ValidationError);
}

TEST_CASE("alias repeating its own canonical name is accepted") {
    CategoryTable table = CategoryTable::from_entries({{4, "boat", {"boat", "ship"}}});
    CHECK(table.resolve("boat").kind == MatchKind::Exact);
    CHECK(table.resolve("ship").kind == MatchKind::Alias);
}

}  // TEST_SUITE
