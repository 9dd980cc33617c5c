#pragma once

#include "guae/action.hpp"
#include "guae/advantage.hpp"
#include "guae/diagnostics.hpp"
#include "guae/edit_distance.hpp"
#include "guae/error.hpp"
#include "guae/commands.hpp"
#include "guae/grpo_sim.hpp"
#include "guae/io.hpp"
#include "guae/policy.hpp"
#include "guae/reward.hpp"
