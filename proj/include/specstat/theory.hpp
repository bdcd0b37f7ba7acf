#pragma once

#include "specstat/fresnel.hpp"
#include "specstat/theory_common.hpp"
#include "specstat/theory_mk.hpp"
#include "specstat/theory_rb.hpp"
