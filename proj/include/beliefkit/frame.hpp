#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beliefkit {

/// Membership bits of a subset. The first 64 elements live in an inline
/// word; wider frames spill into `high_`, so small frames never allocate.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t width);
    static Bits from_word(std::size_t width, std::uint64_t word);

    bool test(std::size_t i) const;
    void set(std::size_t i, bool value = true);

    std::size_t count() const;
    bool none() const;

    /// Low word; the whole set for frames of at most 64 elements.
    std::uint64_t low_word() const { return low_; }
    std::size_t word_count() const { return 1 + high_.size(); }
    std::uint64_t word(std::size_t w) const { return w == 0 ? low_ : high_[w - 1]; }

    Bits& operator&=(const Bits& rhs);
    Bits& operator|=(const Bits& rhs);
    /// Complement restricted to the first `width` positions.
    Bits flipped(std::size_t width) const;

    bool is_subset_of(const Bits& rhs) const;
    bool intersects(const Bits& rhs) const;

    bool operator==(const Bits&) const = default;
    std::strong_ordering operator<=>(const Bits& rhs) const;

private:
    std::uint64_t low_ = 0;
    std::vector<std::uint64_t> high_;
};

class Subset;

namespace detail {
struct FrameData;
}

/// Finite frame of discernment: an ordered list of distinct, non-empty labels.
/// Copies share one immutable label table.
class Frame {
public:
    explicit Frame(std::vector<std::string> labels);

    std::size_t size() const;
    const std::vector<std::string>& labels() const;
    const std::string& label(std::size_t i) const;
    std::size_t index_of(std::string_view name) const;
    bool contains(std::string_view name) const;

    /// Same element sequence. Frames with the same labels in a different
    /// order are different frames.
    bool same_as(const Frame& other) const;

    Subset subset_of(std::span<const std::string> names) const;
    Subset subset_of(std::initializer_list<std::string_view> names) const;
    Subset empty_set() const;
    Subset full_set() const;
    Subset singleton(std::size_t i) const;
    Subset from_bits(Bits bits) const;
    /// Only valid for frames of at most 64 elements.
    Subset from_word(std::uint64_t word) const;

private:
    friend class Subset;
    explicit Frame(std::shared_ptr<const detail::FrameData> data) : data_(std::move(data)) {}
    std::shared_ptr<const detail::FrameData> data_;
};

/// A subset of a frame. Binary operations require both operands to come
/// from the same frame and throw FrameMismatch otherwise.
class Subset {
public:
    Frame frame() const { return Frame(frame_); }
    const Bits& bits() const { return bits_; }

    bool contains(std::size_t i) const { return bits_.test(i); }
    bool contains(std::string_view name) const;
    std::size_t cardinality() const { return bits_.count(); }
    bool is_empty() const { return bits_.none(); }
    bool is_full() const;

    Subset complement() const;
    Subset intersect(const Subset& rhs) const;
    Subset unite(const Subset& rhs) const;
    bool is_subset_of(const Subset& rhs) const;
    bool intersects(const Subset& rhs) const;

    /// Element indices in frame order.
    std::vector<std::size_t> indices() const;
    /// Element names in lexicographic order (the canonical serialized form).
    std::vector<std::string> sorted_names() const;
    std::string to_string() const;

    bool same_frame(const Subset& rhs) const;

    /// Equality compares membership; subsets of different frames are never equal.
    friend bool operator==(const Subset& a, const Subset& b);
    /// Ordering by membership bits only; callers keep keys within one frame.
    friend std::strong_ordering operator<=>(const Subset& a, const Subset& b) {
        return a.bits_ <=> b.bits_;
    }

private:
    friend class Frame;
    Subset(std::shared_ptr<const detail::FrameData> frame, Bits bits)
        : frame_(std::move(frame)), bits_(std::move(bits)) {}
    void require_same_frame(const Subset& rhs, std::string_view op) const;

    std::shared_ptr<const detail::FrameData> frame_;
    Bits bits_;
};

inline Subset complement(const Subset& a) { return a.complement(); }
inline Subset intersect(const Subset& a, const Subset& b) { return a.intersect(b); }
inline Subset unite(const Subset& a, const Subset& b) { return a.unite(b); }
inline bool is_subset(const Subset& a, const Subset& b) { return a.is_subset_of(b); }
inline bool is_empty(const Subset& a) { return a.is_empty(); }

/// Throws FrameMismatch unless the frames carry the same element sequence.
void require_same_frame(const Frame& a, const Frame& b, std::string_view context);

inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// All 2^n subsets of a frame, in increasing bit-mask order.
class SubsetRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = Subset;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = Subset;

        iterator() = default;
        iterator(const Frame* frame, std::uint64_t mask) : frame_(frame), mask_(mask) {}
        Subset operator*() const { return frame_->from_word(mask_); }
        iterator& operator++() { ++mask_; return *this; }
        iterator operator++(int) { auto tmp = *this; ++mask_; return tmp; }
        bool operator==(const iterator& rhs) const { return mask_ == rhs.mask_; }

    private:
        const Frame* frame_ = nullptr;
        std::uint64_t mask_ = 0;
    };

    SubsetRange(Frame frame, std::size_t cap = kDefaultEnumerationCap);

    iterator begin() const { return {&frame_, 0}; }
    iterator end() const { return {&frame_, count_}; }
    std::uint64_t size() const { return count_; }

private:
    Frame frame_;
    std::uint64_t count_;
};

/// Throws FrameTooLarge when the frame exceeds `cap` elements.
SubsetRange enumerate_subsets(const Frame& frame, std::size_t cap = kDefaultEnumerationCap);

}  // namespace beliefkit
