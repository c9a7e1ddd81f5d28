#pragma once

#include <string>
#include <string_view>

#include "clem/core.hpp"

namespace clem {

std::string html_escape(std::string_view text);

// Self-contained HTML page for one terminal episode: a header (game,
// experiment, instance, models, outcome) and one block per event in seq
// order. GM prompts are greyed, player moves are emphasized, and every
// string from the record is escaped. Throws ValidationError naming the
// broken invariant when the event log is malformed.
std::string transcribe_html(const EpisodeRecord& record);

}  // namespace clem
