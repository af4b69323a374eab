#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "chimp/trace.hpp"

namespace chimp {

// ---------------------------------------------------------------------------
// Primitive argument generators
// ---------------------------------------------------------------------------

struct IntConst {
    long long value = 0;
    bool operator==(const IntConst&) const = default;
};
struct IntChoose {
    long long lo = 0, hi = 0; // inclusive, lo <= hi
    bool operator==(const IntChoose&) const = default;
};
struct IntOneOf {
    std::vector<long long> values; // non-empty
    bool operator==(const IntOneOf&) const = default;
};
using IntGen = std::variant<IntConst, IntChoose, IntOneOf>;

struct StrConst {
    std::string value;
    bool operator==(const StrConst&) const = default;
};
struct StrOneOf {
    std::vector<std::string> values; // non-empty
    bool operator==(const StrOneOf&) const = default;
};
// Lowercase ASCII strings of length 0..max_len.
struct AlphaStr {
    int max_len = 8;
    bool operator==(const AlphaStr&) const = default;
};
using StrGen = std::variant<StrConst, StrOneOf, AlphaStr>;

struct XyConst {
    XyPair value;
    bool operator==(const XyConst&) const = default;
};
struct XyRect {
    int x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0; // inclusive
    bool operator==(const XyRect&) const = default;
};
using XyGen = std::variant<XyConst, XyRect>;

struct IdConcrete {
    UiId id;
    bool operator==(const IdConcrete&) const = default;
};
struct IdWildcard {
    bool operator==(const IdWildcard&) const = default;
};
struct IdOneOf {
    std::vector<UiId> ids; // non-empty, concrete
    bool operator==(const IdOneOf&) const = default;
};
// Coordinate-ranging identifier: ids drawn as screen points from an XyGen.
// This is what lets the coordinate monkey pool write Click(<random point>).
struct IdFromXy {
    XyGen xy;
    bool operator==(const IdFromXy&) const = default;
};
using IdGen = std::variant<IdConcrete, IdWildcard, IdOneOf, IdFromXy>;

// ---------------------------------------------------------------------------
// Trace generators
// ---------------------------------------------------------------------------

class Gen;
using GenPtr = std::shared_ptr<const Gen>;

// A generator denotes a set of traces; sample() draws one member, denotes()
// decides membership, enumerate_traces() lists every member of a finite one.
class Gen {
public:
    struct EvClick {
        IdGen id;
    };
    struct EvLongClick {
        IdGen id;
    };
    struct EvType {
        IdGen id;
        StrGen text;
    };
    struct EvSwipe {
        IdGen id;
        XyGen delta;
    };
    struct EvPinch {
        XyGen from;
        XyGen to;
    };
    struct EvSleep {
        IntGen millis;
    };
    struct SkipG {};
    struct DeviceG {
        DeviceEvent event;
    };
    struct SeqG {
        GenPtr first, second;
    };
    struct ChoiceG {
        GenPtr left, right;
    };
    struct TryG {
        GenPtr body;
    };
    struct ThenG {
        PropPtr guard;
        GenPtr body;
    };
    struct RepeatG {
        int bound = 1; // sequences 1..bound samples of the body
        GenPtr body;
    };
    struct AssertG {
        PropPtr prop;
    };
    struct UnitG {};

    using Node = std::variant<EvClick, EvLongClick, EvType, EvSwipe, EvPinch,
                              EvSleep, SkipG, DeviceG, SeqG, ChoiceG, TryG,
                              ThenG, RepeatG, AssertG, UnitG>;

    explicit Gen(Node n) : node(std::move(n)) {}
    Node node;

    static GenPtr click(IdGen id);
    static GenPtr long_click(IdGen id);
    static GenPtr type_text(IdGen id, StrGen text);
    static GenPtr swipe(IdGen id, XyGen delta);
    static GenPtr pinch(XyGen from, XyGen to);
    static GenPtr sleep(IntGen millis);
    static GenPtr skip();
    static GenPtr device(DeviceEvent d);
    static GenPtr seq(GenPtr first, GenPtr second);
    static GenPtr choice(GenPtr left, GenPtr right);
    static GenPtr attempt(GenPtr body);
    static GenPtr guarded(PropPtr guard, GenPtr body);
    static GenPtr repeat(int bound, GenPtr body); // bound >= 1
    static GenPtr assertion(PropPtr p);
    static GenPtr unit();
};

bool gen_equal(const Gen& a, const Gen& b);

// ---------------------------------------------------------------------------
// Sampling and membership
// ---------------------------------------------------------------------------

struct SampleCfg {
    std::uint64_t rng_seed = 0;
};

// Draws one member of the generator's trace set. Pure function of (g, seed):
// arguments are drawn uniformly, choices with probability 1/2 per node, and
// repeat bounds uniformly in {1..n}.
TracePtr sample(const Gen& g, const SampleCfg& cfg);

// Decides normalize(t) ∈ ⟦g⟧ modulo the (Seq, Unit) monoid laws, by
// compiling g to an NFA over trace atoms and simulating it.
bool denotes(const Gen& g, const TracePtr& t);

struct TooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exactly the normalized members of ⟦g⟧, deduplicated, sorted by rendered
// form. Throws UnboundedError for AlphaStr or Choose/Rect ranges wider than
// 16, TooLargeError when the member count exceeds limit.
std::vector<TracePtr> enumerate_traces(const Gen& g, std::size_t limit);

// ---------------------------------------------------------------------------
// Derived combinators
// ---------------------------------------------------------------------------

// The interrupt pool: ClickHome <+> ClickMenu <+> Settings <+> Rotate.
GenPtr interrupt_gen();

// optional G = G <+> Skip.
GenPtr optional_gen(GenPtr g);

// G1 *>> G2: sequencing with 1..m interrupt events inserted in between.
GenPtr interruptible_seq(GenPtr g1, GenPtr g2, int m = 3);

// assert P :>> G :>> assert P.
GenPtr preserves(GenPtr g, PropPtr p);

// Argument pools used by the monkey-style combinators; each field bounds one
// primitive argument domain.
struct MonkeyPools {
    XyGen xy = XyRect{0, 479, 0, 799}; // virtual 480x800 display
    StrGen text = AlphaStr{8};
    IntGen sleep_ms = IntChoose{0, 5000};

    static MonkeyPools defaults() { return MonkeyPools{}; }
};

// repeat n over try-wrapped coordinate events or a bare interrupt.
GenPtr monkey(int n, const MonkeyPools& pools = MonkeyPools::defaults());

// Same shape, but Click/LongClick/Type/Swipe target the wildcard so the
// driver infers targets from the live view hierarchy.
GenPtr relevant_monkey(int n, const MonkeyPools& pools = MonkeyPools::defaults());

// repeat n of (inject :>> one random event). Defaults to the wildcard pool;
// set coordinate_pool for the coordinate-event variant.
GenPtr gorilla(int n, GenPtr inject, bool coordinate_pool = false,
               const MonkeyPools& pools = MonkeyPools::defaults());

} // namespace chimp
