#include "mfbm/rng.hpp"

namespace mfbm {

const char* stream_tag_name(StreamTag tag) {
    switch (tag) {
        case StreamTag::fbm:    return "fbm";
        case StreamTag::wiener: return "wiener";
        case StreamTag::probe:  return "probe";
        case StreamTag::event:  return "event";
    }
    return "unknown";
}

} // namespace mfbm
