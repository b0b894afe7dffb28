#include "beliefkit/frame.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "beliefkit/error.hpp"

namespace beliefkit {

namespace detail {

struct FrameData {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
};

}  // namespace detail

namespace {

std::size_t words_for(std::size_t width) { return width == 0 ? 1 : (width + 63) / 64; }

std::uint64_t tail_mask(std::size_t width, std::size_t word) {
    const std::size_t begin = word * 64;
    if (width >= begin + 64) return ~std::uint64_t{0};
    if (width <= begin) return 0;
    return (std::uint64_t{1} << (width - begin)) - 1;
}

}  // namespace

// ---- Bits -------------------------------------------------------------------

Bits::Bits(std::size_t width) : high_(words_for(width) - 1, 0) {}

Bits Bits::from_word(std::size_t width, std::uint64_t word) {
    Bits b(width);
    b.low_ = word & tail_mask(width, 0);
    return b;
}

bool Bits::test(std::size_t i) const {
    const std::uint64_t w = i < 64 ? low_ : high_[i / 64 - 1];
    return (w >> (i % 64)) & 1u;
}

void Bits::set(std::size_t i, bool value) {
    std::uint64_t& w = i < 64 ? low_ : high_[i / 64 - 1];
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    w = value ? (w | bit) : (w & ~bit);
}

std::size_t Bits::count() const {
    std::size_t n = static_cast<std::size_t>(std::popcount(low_));
    for (auto w : high_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool Bits::none() const {
    return low_ == 0 && std::all_of(high_.begin(), high_.end(), [](auto w) { return w == 0; });
}

Bits& Bits::operator&=(const Bits& rhs) {
    low_ &= rhs.low_;
    for (std::size_t i = 0; i < high_.size(); ++i) high_[i] &= rhs.high_[i];
    return *this;
}

Bits& Bits::operator|=(const Bits& rhs) {
    low_ |= rhs.low_;
    for (std::size_t i = 0; i < high_.size(); ++i) high_[i] |= rhs.high_[i];
    return *this;
}

Bits Bits::flipped(std::size_t width) const {
    Bits out = *this;
    out.low_ = ~low_ & tail_mask(width, 0);
    for (std::size_t i = 0; i < high_.size(); ++i) out.high_[i] = ~high_[i] & tail_mask(width, i + 1);
    return out;
}

bool Bits::is_subset_of(const Bits& rhs) const {
    if ((low_ & ~rhs.low_) != 0) return false;
    for (std::size_t i = 0; i < high_.size(); ++i)
        if ((high_[i] & ~rhs.high_[i]) != 0) return false;
    return true;
}

bool Bits::intersects(const Bits& rhs) const {
    if ((low_ & rhs.low_) != 0) return true;
    for (std::size_t i = 0; i < high_.size(); ++i)
        if ((high_[i] & rhs.high_[i]) != 0) return true;
    return false;
}

std::strong_ordering Bits::operator<=>(const Bits& rhs) const {
    // Most significant word first, so single-word frames order by their mask.
    if (auto c = high_.size() <=> rhs.high_.size(); c != 0) return c;
    for (std::size_t i = high_.size(); i-- > 0;)
        if (auto c = high_[i] <=> rhs.high_[i]; c != 0) return c;
    return low_ <=> rhs.low_;
}

// ---- Frame ------------------------------------------------------------------

Frame::Frame(std::vector<std::string> labels) {
    if (labels.empty()) throw Error(ErrorCode::ValidationError, "frame must contain at least one element");
    auto data = std::make_shared<detail::FrameData>();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].empty()) throw Error(ErrorCode::ValidationError, "frame labels must be non-empty");
        if (!data->index.emplace(labels[i], i).second)
            throw Error(ErrorCode::ValidationError, "duplicate frame label '" + labels[i] + "'");
    }
    data->labels = std::move(labels);
    data_ = std::move(data);
}

std::size_t Frame::size() const { return data_->labels.size(); }
const std::vector<std::string>& Frame::labels() const { return data_->labels; }
const std::string& Frame::label(std::size_t i) const { return data_->labels.at(i); }

std::size_t Frame::index_of(std::string_view name) const {
    auto it = data_->index.find(std::string(name));
    if (it == data_->index.end())
        throw Error(ErrorCode::UnknownElement, "element '" + std::string(name) + "' is not in the frame");
    return it->second;
}

bool Frame::contains(std::string_view name) const { return data_->index.contains(std::string(name)); }

bool Frame::same_as(const Frame& other) const {
    return data_ == other.data_ || data_->labels == other.data_->labels;
}

Subset Frame::subset_of(std::span<const std::string> names) const {
    Bits bits(size());
    for (const auto& n : names) bits.set(index_of(n));
    return Subset(data_, std::move(bits));
}

Subset Frame::subset_of(std::initializer_list<std::string_view> names) const {
    Bits bits(size());
    for (auto n : names) bits.set(index_of(n));
    return Subset(data_, std::move(bits));
}

Subset Frame::empty_set() const { return Subset(data_, Bits(size())); }
Subset Frame::full_set() const { return Subset(data_, Bits(size()).flipped(size())); }

Subset Frame::singleton(std::size_t i) const {
    if (i >= size()) throw Error(ErrorCode::UnknownElement, "element index out of range");
    Bits bits(size());
    bits.set(i);
    return Subset(data_, std::move(bits));
}

Subset Frame::from_bits(Bits bits) const {
    if (bits.word_count() != words_for(size()) || bits != (bits.flipped(size()).flipped(size())))
        throw Error(ErrorCode::FrameMismatch, "bit width does not match the frame");
    return Subset(data_, std::move(bits));
}

Subset Frame::from_word(std::uint64_t word) const {
    if (size() > 64) throw Error(ErrorCode::FrameTooLarge, "single-word subsets need a frame of at most 64 elements");
    return Subset(data_, Bits::from_word(size(), word));
}

void require_same_frame(const Frame& a, const Frame& b, std::string_view context) {
    if (!a.same_as(b)) throw Error(ErrorCode::FrameMismatch, std::string(context) + ": operands belong to different frames");
}

// ---- Subset -----------------------------------------------------------------

bool Subset::contains(std::string_view name) const { return bits_.test(frame().index_of(name)); }
bool Subset::is_full() const { return cardinality() == frame_->labels.size(); }

bool Subset::same_frame(const Subset& rhs) const {
    return frame_ == rhs.frame_ || frame_->labels == rhs.frame_->labels;
}

void Subset::require_same_frame(const Subset& rhs, std::string_view op) const {
    if (!same_frame(rhs)) throw Error(ErrorCode::FrameMismatch, std::string(op) + ": subsets belong to different frames");
}

Subset Subset::complement() const { return Subset(frame_, bits_.flipped(frame_->labels.size())); }

Subset Subset::intersect(const Subset& rhs) const {
    require_same_frame(rhs, "intersect");
    Bits b = bits_;
    b &= rhs.bits_;
    return Subset(frame_, std::move(b));
}

Subset Subset::unite(const Subset& rhs) const {
    require_same_frame(rhs, "union");
    Bits b = bits_;
    b |= rhs.bits_;
    return Subset(frame_, std::move(b));
}

bool Subset::is_subset_of(const Subset& rhs) const {
    require_same_frame(rhs, "is_subset");
    return bits_.is_subset_of(rhs.bits_);
}

bool Subset::intersects(const Subset& rhs) const {
    require_same_frame(rhs, "intersects");
    return bits_.intersects(rhs.bits_);
}

std::vector<std::size_t> Subset::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frame_->labels.size(); ++i)
        if (bits_.test(i)) out.push_back(i);
    return out;
}

std::vector<std::string> Subset::sorted_names() const {
    std::vector<std::string> out;
    for (auto i : indices()) out.push_back(frame_->labels[i]);
    std::sort(out.begin(), out.end());
    return out;
}

std::string Subset::to_string() const {
    std::string s = "{";
    bool first = true;
    for (const auto& n : sorted_names()) {
        if (!first) s += ",";
        s += n;
        first = false;
    }
    return s + "}";
}

bool operator==(const Subset& a, const Subset& b) { return a.bits_ == b.bits_ && a.same_frame(b); }

// ---- enumeration ------------------------------------------------------------

SubsetRange::SubsetRange(Frame frame, std::size_t cap) : frame_(std::move(frame)) {
    if (frame_.size() > cap || frame_.size() >= 64)
        throw Error(ErrorCode::FrameTooLarge, "frame of " + std::to_string(frame_.size()) +
                                                  " elements exceeds the enumeration cap of " + std::to_string(cap));
    count_ = std::uint64_t{1} << frame_.size();
}

SubsetRange enumerate_subsets(const Frame& frame, std::size_t cap) { return SubsetRange(frame, cap); }

}  // namespace beliefkit
