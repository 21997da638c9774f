#include <doctest.h>

#include "segquery/errors.hpp"
#include "segquery/templates.hpp"

using namespace segquery;

TEST_SUITE("templates") {

TEST_CASE("canonical template produces the reference wording") {
    CHECK(build_query({"sky", "road"}, 0) ==
          "<IMAGE> Can you segment the sky, road in this image?");
    CHECK(build_query({"cat"}, 0) == "<IMAGE> Can you segment the cat in this image?");
}

TEST_CASE("templates differ in wording but keep name order") {
    const std::vector<std::string> names{"sky", "potted plant", "road"};
    const std::string base = build_query(names, 0);
    for (std::size_t id = 1; id < template_count(); ++id) {
        const std::string variant = build_query(names, id);
        CHECK(variant != base);
        auto recovered = extract_query_names(variant);
        REQUIRE(recovered.has_value());
        CHECK(*recovered == names);
    }
}

TEST_CASE("extraction inverts building for every template") {
    const std::vector<std::vector<std::string>> lists{
        {"sky"},
        {"sky", "road"},
        {"tv monitor", "person", "potted plant", "dog"},
    };
    for (std::size_t id = 0; id < template_count(); ++id) {
        for (const auto& names : lists) {
            auto recovered = extract_query_names(build_query(names, id));
            REQUIRE(recovered.has_value());
            CHECK(*recovered == names);
        }
    }
}

TEST_CASE("extraction rejects text outside the template set") {
    CHECK_FALSE(extract_query_names("segment the sky please").has_value());
    CHECK_FALSE(extract_query_names("").has_value());
    // Empty list: prefix and suffix abut, which the length guard rejects.
    CHECK_FALSE(extract_query_names("<IMAGE> Can you segment the  in this image?").has_value());
    CHECK_FALSE(extract_query_names("<IMAGE> Can you segment the sky in this image").has_value());
}

TEST_CASE("builder rejects bad input") {
    CHECK_THROWS_WITH_AS((void)build_query({}, 0), doctest::Contains("empty name list"),
                         ValidationError);
    CHECK_THROWS_WITH_AS((void)build_query({"sky"}, template_count()),
                         doctest::Contains("out of range"), ValidationError);
}

TEST_CASE("special tokens are frozen") {
    CHECK(kSegToken == "<SEG>");
    CHECK(kNegToken == "<NEG>");
    CHECK(kImageToken == "<IMAGE>");
    CHECK(kEmptyPositiveResponse == "none of the requested classes are present.");
}

}  // TEST_SUITE
