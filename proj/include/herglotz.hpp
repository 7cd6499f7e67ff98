#pragma once

#include "herglotz/averaging.hpp"
#include "herglotz/measure.hpp"
#include "herglotz/rankone.hpp"
#include "herglotz/recovery.hpp"
#include "herglotz/triple.hpp"
