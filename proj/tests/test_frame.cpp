#include <doctest.h>

#include <set>

#include "beliefkit/frame.hpp"
#include "beliefkit/error.hpp"

using namespace beliefkit;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("subset_of builds exact member sets") {
    Frame f({"a", "b", "c"});
    auto ab = f.subset_of({"a", "b"});
    CHECK(ab.cardinality() == 2);
    CHECK(ab.contains("a"));
    CHECK(ab.contains("b"));
    CHECK_FALSE(ab.contains("c"));
    CHECK(f.subset_of(std::initializer_list<std::string_view>{}).is_empty());
    CHECK(f.subset_of({"a", "b", "c"}).is_full());
    CHECK(f.subset_of({"a", "b", "c"}) == f.full_set());
}

TEST_CASE("unknown element names are rejected") {
    Frame f({"a", "b", "c"});
    CHECK(code_of([&] { f.subset_of({"a", "z"}); }) == ErrorCode::UnknownElement);
    CHECK(code_of([&] { f.index_of("z"); }) == ErrorCode::UnknownElement);
}

TEST_CASE("frame labels must be distinct and non-empty") {
    CHECK(code_of([] { Frame f(std::vector<std::string>{}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { Frame f({"a", "a"}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { Frame f({"a", ""}); }) == ErrorCode::ValidationError);
}

TEST_CASE("boolean algebra on a three element frame") {
    Frame f({"a", "b", "c"});
    CHECK(complement(f.subset_of({"a", "b"})) == f.subset_of({"c"}));
    CHECK(intersect(f.subset_of({"a", "b"}), f.subset_of({"b", "c"})) == f.subset_of({"b"}));
    CHECK(unite(f.subset_of({"a"}), f.subset_of({"c"})) == f.subset_of({"a", "c"}));
    for (const auto& s : enumerate_subsets(f)) {
        CHECK(is_subset(f.empty_set(), s));
        CHECK(complement(complement(s)) == s);
        CHECK(is_empty(intersect(s, complement(s))));
        CHECK(unite(s, complement(s)).is_full());
    }
}

TEST_CASE("operations across different frames fail loudly") {
    Frame f({"a", "b", "c"});
    Frame g({"a", "c", "b"});
    CHECK(code_of([&] { f.subset_of({"a"}).intersect(g.subset_of({"a"})); }) == ErrorCode::FrameMismatch);
    CHECK(code_of([&] { f.subset_of({"a"}).unite(g.subset_of({"a"})); }) == ErrorCode::FrameMismatch);
    CHECK(code_of([&] { (void)f.subset_of({"a"}).is_subset_of(g.subset_of({"a"})); }) == ErrorCode::FrameMismatch);
    CHECK_FALSE(f.subset_of({"a"}) == g.subset_of({"a"}));
    Frame same({"a", "b", "c"});
    CHECK(f.same_as(same));
    CHECK(f.subset_of({"a"}).intersect(same.subset_of({"a", "b"})) == f.subset_of({"a"}));
}

TEST_CASE("enumeration yields every subset exactly once") {
    for (std::size_t n : {1u, 3u, 5u}) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i));
        Frame f(labels);
        std::set<std::vector<std::size_t>> seen;
        for (const auto& s : enumerate_subsets(f)) seen.insert(s.indices());
        CHECK(seen.size() == (std::size_t{1} << n));
    }
    Frame one({"x"});
    std::vector<Subset> all;
    for (const auto& s : enumerate_subsets(one)) all.push_back(s);
    REQUIRE(all.size() == 2);
    CHECK(all[0].is_empty());
    CHECK(all[1].is_full());
}

TEST_CASE("enumeration beyond the cap is refused") {
    std::vector<std::string> labels;
    for (int i = 0; i < 21; ++i) labels.push_back("e" + std::to_string(i));
    Frame f(labels);
    CHECK(code_of([&] { enumerate_subsets(f); }) == ErrorCode::FrameTooLarge);
    CHECK(enumerate_subsets(f, 21).size() == (std::uint64_t{1} << 21));
}

TEST_CASE("wide frames spill past one machine word") {
    std::vector<std::string> labels;
    for (int i = 0; i < 130; ++i) labels.push_back("e" + std::to_string(i));
    Frame f(labels);
    auto s = f.subset_of({"e0", "e64", "e129"});
    CHECK(s.cardinality() == 3);
    CHECK(s.complement().cardinality() == 127);
    CHECK(s.intersect(f.subset_of({"e64", "e100"})) == f.subset_of({"e64"}));
    CHECK(s.complement().complement() == s);
    CHECK(f.full_set().is_full());
    CHECK(s.is_subset_of(f.full_set()));
}

TEST_CASE("subsets print with sorted names") {
    Frame f({"c", "a", "b"});
    CHECK(f.subset_of({"c", "a"}).to_string() == "{a,c}");
    CHECK(f.empty_set().to_string() == "{}");
    CHECK(f.subset_of({"c", "a"}).sorted_names() == std::vector<std::string>{"a", "c"});
}
