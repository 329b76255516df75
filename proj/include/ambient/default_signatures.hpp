#pragma once

// Embedded copy of data/default_signatures.sig (kept in sync by a unit test).

#include <string_view>

namespace ambient {

inline constexpr std::string_view kDefaultSignatureText = R"SIG(# Default per-activity channel signatures for the synthetic generator.
# sig <label> <channel> key=value ...; omitted keys are 0.
# Continuous: value = dc + amp*sin(2*pi*freq*t + phase) + bursts + N(0, noise).
# Binary (pir): on_prob is the trigger rate per second; each trigger holds ON for 1 s.
# paperdis, pour_water and chat share everything except the audio burst rate.

sig eat pir on_prob=3
sig eat accel_x noise=0.01
sig eat accel_y noise=0.01
sig eat accel_z dc=1 amp=0.15 freq=3 noise=0.01
sig eat audio dc=0.6 noise=0.05
sig eat rgb_r dc=120 noise=1
sig eat rgb_g dc=110 noise=1
sig eat rgb_b dc=100 noise=1
sig eat pressure dc=1013 noise=0.05
sig eat humidity dc=40 noise=0.2
sig eat mag_x dc=20 noise=0.3
sig eat mag_y dc=-5 noise=0.3
sig eat mag_z dc=40 noise=0.3
sig eat gas dc=100 noise=0.5
sig eat temperature dc=22.5 noise=0.05

sig paperdis pir on_prob=4
sig paperdis accel_x noise=0.01
sig paperdis accel_y amp=0.08 freq=5 noise=0.01
sig paperdis accel_z dc=1 noise=0.01
sig paperdis audio dc=0.9 burst_rate=4.5 burst_amp=1 noise=0.3
sig paperdis rgb_r dc=120 noise=1
sig paperdis rgb_g dc=110 noise=1
sig paperdis rgb_b dc=100 noise=1
sig paperdis pressure dc=1013 noise=0.05
sig paperdis humidity dc=40 noise=0.2
sig paperdis mag_x dc=20 noise=0.3
sig paperdis mag_y dc=-11 noise=0.3
sig paperdis mag_z dc=40 noise=0.3
sig paperdis gas dc=100 noise=0.5
sig paperdis temperature dc=22 noise=0.05

sig write pir on_prob=3
sig write accel_x amp=0.05 freq=6 noise=0.01
sig write accel_y noise=0.01
sig write accel_z dc=1 noise=0.01
sig write audio dc=0.45 noise=0.05
sig write rgb_r dc=120 noise=1
sig write rgb_g dc=110 noise=1
sig write rgb_b dc=85 noise=1
sig write pressure dc=1013 noise=0.05
sig write humidity dc=40 noise=0.2
sig write mag_x dc=20 noise=0.3
sig write mag_y dc=-5 noise=0.3
sig write mag_z dc=40 noise=0.3
sig write gas dc=100 noise=0.5
sig write temperature dc=22 noise=0.05

sig chop pir on_prob=3
sig chop accel_x noise=0.01
sig chop accel_y noise=0.01
sig chop accel_z dc=1 amp=0.8 freq=4 noise=0.01
sig chop audio dc=0.5 burst_rate=4 burst_amp=2 noise=0.05
sig chop rgb_r dc=120 noise=1
sig chop rgb_g dc=110 noise=1
sig chop rgb_b dc=100 noise=1
sig chop pressure dc=1013 noise=0.05
sig chop humidity dc=40 noise=0.2
sig chop mag_x dc=20 noise=0.3
sig chop mag_y dc=-5 noise=0.3
sig chop mag_z dc=40 noise=0.3
sig chop gas dc=100 noise=0.5
sig chop temperature dc=22 noise=0.05

sig hand_wash pir on_prob=3
sig hand_wash accel_x noise=0.01
sig hand_wash accel_y amp=0.1 freq=12 noise=0.01
sig hand_wash accel_z dc=1 noise=0.01
sig hand_wash audio dc=1.2 noise=0.05
sig hand_wash rgb_r dc=120 noise=1
sig hand_wash rgb_g dc=110 noise=1
sig hand_wash rgb_b dc=100 noise=1
sig hand_wash pressure dc=1013 noise=0.05
sig hand_wash humidity dc=48 noise=0.2
sig hand_wash mag_x dc=20 noise=0.3
sig hand_wash mag_y dc=-5 noise=0.3
sig hand_wash mag_z dc=40 noise=0.3
sig hand_wash gas dc=100 noise=0.5
sig hand_wash temperature dc=22 noise=0.05

sig pour_water pir on_prob=4
sig pour_water accel_x noise=0.01
sig pour_water accel_y amp=0.08 freq=5 noise=0.01
sig pour_water accel_z dc=1 noise=0.01
sig pour_water audio dc=0.9 burst_rate=9 burst_amp=1 noise=0.3
sig pour_water rgb_r dc=120 noise=1
sig pour_water rgb_g dc=110 noise=1
sig pour_water rgb_b dc=100 noise=1
sig pour_water pressure dc=1013 noise=0.05
sig pour_water humidity dc=40 noise=0.2
sig pour_water mag_x dc=20 noise=0.3
sig pour_water mag_y dc=-11 noise=0.3
sig pour_water mag_z dc=40 noise=0.3
sig pour_water gas dc=100 noise=0.5
sig pour_water temperature dc=22 noise=0.05

sig clean_floor pir on_prob=3
sig clean_floor accel_x amp=0.4 freq=1.5 noise=0.01
sig clean_floor accel_y noise=0.01
sig clean_floor accel_z dc=1 noise=0.01
sig clean_floor audio dc=0.5 noise=0.05
sig clean_floor rgb_r dc=120 noise=1
sig clean_floor rgb_g dc=110 noise=1
sig clean_floor rgb_b dc=100 noise=1
sig clean_floor pressure dc=1013 noise=0.05
sig clean_floor humidity dc=40 noise=0.2
sig clean_floor mag_x dc=20 noise=0.3
sig clean_floor mag_y dc=-5 noise=0.3
sig clean_floor mag_z dc=40 noise=0.3
sig clean_floor gas dc=105 noise=0.5
sig clean_floor temperature dc=22 noise=0.05

sig knock pir on_prob=3
sig knock accel_x burst_rate=3 burst_amp=1.5 noise=0.01
sig knock accel_y noise=0.01
sig knock accel_z dc=1 noise=0.01
sig knock audio dc=0.4 burst_rate=3 burst_amp=1.5 noise=0.05
sig knock rgb_r dc=120 noise=1
sig knock rgb_g dc=110 noise=1
sig knock rgb_b dc=100 noise=1
sig knock pressure dc=1013 noise=0.05
sig knock humidity dc=40 noise=0.2
sig knock mag_x dc=20 noise=0.3
sig knock mag_y dc=-5 noise=0.3
sig knock mag_z dc=44 noise=0.3
sig knock gas dc=100 noise=0.5
sig knock temperature dc=22 noise=0.05

sig run pir on_prob=6
sig run accel_x noise=0.01
sig run accel_y noise=0.01
sig run accel_z dc=1 amp=1.2 freq=2.8 noise=0.01
sig run audio dc=0.7 noise=0.05
sig run rgb_r dc=120 noise=1
sig run rgb_g dc=110 noise=1
sig run rgb_b dc=100 noise=1
sig run pressure dc=1013 noise=0.05
sig run humidity dc=40 noise=0.2
sig run mag_x dc=20 noise=0.3
sig run mag_y dc=-5 noise=0.3
sig run mag_z dc=40 noise=0.3
sig run gas dc=115 noise=0.5
sig run temperature dc=23 noise=0.05

sig curtain pir on_prob=3
sig curtain accel_x noise=0.01
sig curtain accel_y amp=0.2 freq=1 noise=0.01
sig curtain accel_z dc=1 noise=0.01
sig curtain audio dc=0.4 noise=0.05
sig curtain rgb_r dc=160 noise=1
sig curtain rgb_g dc=150 noise=1
sig curtain rgb_b dc=140 noise=1
sig curtain pressure dc=1013 noise=0.05
sig curtain humidity dc=40 noise=0.2
sig curtain mag_x dc=20 noise=0.3
sig curtain mag_y dc=-5 noise=0.3
sig curtain mag_z dc=40 noise=0.3
sig curtain gas dc=100 noise=0.5
sig curtain temperature dc=22 noise=0.05

sig light_switch pir on_prob=3
sig light_switch accel_x noise=0.01
sig light_switch accel_y noise=0.01
sig light_switch accel_z dc=1 noise=0.01
sig light_switch audio dc=0.35 burst_rate=1 burst_amp=0.8 noise=0.05
sig light_switch rgb_r dc=200 noise=1
sig light_switch rgb_g dc=190 noise=1
sig light_switch rgb_b dc=160 noise=1
sig light_switch pressure dc=1013 noise=0.05
sig light_switch humidity dc=40 noise=0.2
sig light_switch mag_x dc=20 noise=0.3
sig light_switch mag_y dc=-5 noise=0.3
sig light_switch mag_z dc=40 noise=0.3
sig light_switch gas dc=100 noise=0.5
sig light_switch temperature dc=22 noise=0.05

sig type pir on_prob=3
sig type accel_x amp=0.03 freq=9 noise=0.01
sig type accel_y noise=0.01
sig type accel_z dc=1 noise=0.01
sig type audio dc=0.45 burst_rate=6 burst_amp=0.3 noise=0.05
sig type rgb_r dc=120 noise=1
sig type rgb_g dc=95 noise=1
sig type rgb_b dc=100 noise=1
sig type pressure dc=1013 noise=0.05
sig type humidity dc=40 noise=0.2
sig type mag_x dc=20 noise=0.3
sig type mag_y dc=-5 noise=0.3
sig type mag_z dc=40 noise=0.3
sig type gas dc=100 noise=0.5
sig type temperature dc=22 noise=0.05

sig door_pass pir on_prob=5
sig door_pass accel_x noise=0.01
sig door_pass accel_y amp=0.3 freq=0.8 noise=0.01
sig door_pass accel_z dc=1 noise=0.01
sig door_pass audio dc=0.4 noise=0.05
sig door_pass rgb_r dc=120 noise=1
sig door_pass rgb_g dc=110 noise=1
sig door_pass rgb_b dc=100 noise=1
sig door_pass pressure dc=1013.3 noise=0.05
sig door_pass humidity dc=40 noise=0.2
sig door_pass mag_x dc=28 noise=0.3
sig door_pass mag_y dc=-5 noise=0.3
sig door_pass mag_z dc=40 noise=0.3
sig door_pass gas dc=100 noise=0.5
sig door_pass temperature dc=22 noise=0.05

sig wipe_desk pir on_prob=3
sig wipe_desk accel_x amp=0.3 freq=2 noise=0.01
sig wipe_desk accel_y noise=0.01
sig wipe_desk accel_z dc=1 noise=0.01
sig wipe_desk audio dc=0.4 noise=0.05
sig wipe_desk rgb_r dc=120 noise=1
sig wipe_desk rgb_g dc=110 noise=1
sig wipe_desk rgb_b dc=100 noise=1
sig wipe_desk pressure dc=1013 noise=0.05
sig wipe_desk humidity dc=42 noise=0.2
sig wipe_desk mag_x dc=20 noise=0.3
sig wipe_desk mag_y dc=-2 noise=0.3
sig wipe_desk mag_z dc=40 noise=0.3
sig wipe_desk gas dc=100 noise=0.5
sig wipe_desk temperature dc=22 noise=0.05

sig chat pir on_prob=4
sig chat accel_x noise=0.01
sig chat accel_y amp=0.08 freq=5 noise=0.01
sig chat accel_z dc=1 noise=0.01
sig chat audio dc=0.9 burst_rate=2 burst_amp=1 noise=0.3
sig chat rgb_r dc=120 noise=1
sig chat rgb_g dc=110 noise=1
sig chat rgb_b dc=100 noise=1
sig chat pressure dc=1013 noise=0.05
sig chat humidity dc=40 noise=0.2
sig chat mag_x dc=20 noise=0.3
sig chat mag_y dc=-11 noise=0.3
sig chat mag_z dc=40 noise=0.3
sig chat gas dc=100 noise=0.5
sig chat temperature dc=22 noise=0.05

sig basketball pir on_prob=3
sig basketball accel_x burst_rate=2 burst_amp=2 noise=0.01
sig basketball accel_y noise=0.01
sig basketball accel_z dc=1 amp=1.5 freq=1.8 noise=0.01
sig basketball audio dc=1 noise=0.05
sig basketball rgb_r dc=120 noise=1
sig basketball rgb_g dc=110 noise=1
sig basketball rgb_b dc=100 noise=1
sig basketball pressure dc=1013 noise=0.05
sig basketball humidity dc=40 noise=0.2
sig basketball mag_x dc=20 noise=0.3
sig basketball mag_y dc=-5 noise=0.3
sig basketball mag_z dc=40 noise=0.3
sig basketball gas dc=108 noise=0.5
sig basketball temperature dc=22 noise=0.05

sig saw pir on_prob=3
sig saw accel_x amp=0.6 freq=20 noise=0.01
sig saw accel_y noise=0.01
sig saw accel_z dc=1 noise=0.01
sig saw audio dc=2 noise=0.05
sig saw rgb_r dc=120 noise=1
sig saw rgb_g dc=110 noise=1
sig saw rgb_b dc=100 noise=1
sig saw pressure dc=1013 noise=0.05
sig saw humidity dc=40 noise=0.2
sig saw mag_x dc=20 noise=0.3
sig saw mag_y dc=-5 noise=0.3
sig saw mag_z dc=36 noise=0.3
sig saw gas dc=100 noise=0.5
sig saw temperature dc=22 noise=0.05

sig shave pir on_prob=3
sig shave accel_x noise=0.01
sig shave accel_y amp=0.2 freq=35 noise=0.01
sig shave accel_z dc=1 noise=0.01
sig shave audio dc=0.8 noise=0.05
sig shave rgb_r dc=100 noise=1
sig shave rgb_g dc=110 noise=1
sig shave rgb_b dc=100 noise=1
sig shave pressure dc=1013 noise=0.05
sig shave humidity dc=44 noise=0.2
sig shave mag_x dc=20 noise=0.3
sig shave mag_y dc=-5 noise=0.3
sig shave mag_z dc=40 noise=0.3
sig shave gas dc=100 noise=0.5
sig shave temperature dc=22 noise=0.05

sig wash_dish pir on_prob=3
sig wash_dish accel_x noise=0.01
sig wash_dish accel_y noise=0.01
sig wash_dish accel_z dc=1 amp=0.15 freq=15 noise=0.01
sig wash_dish audio dc=1 noise=0.05
sig wash_dish rgb_r dc=120 noise=1
sig wash_dish rgb_g dc=110 noise=1
sig wash_dish rgb_b dc=100 noise=1
sig wash_dish pressure dc=1013 noise=0.05
sig wash_dish humidity dc=50 noise=0.2
sig wash_dish mag_x dc=20 noise=0.3
sig wash_dish mag_y dc=-5 noise=0.3
sig wash_dish mag_z dc=40 noise=0.3
sig wash_dish gas dc=100 noise=0.5
sig wash_dish temperature dc=21.5 noise=0.05

sig teeth pir on_prob=3
sig teeth accel_x amp=0.1 freq=40 noise=0.01
sig teeth accel_y noise=0.01
sig teeth accel_z dc=1 noise=0.01
sig teeth audio dc=0.5 noise=0.05
sig teeth rgb_r dc=120 noise=1
sig teeth rgb_g dc=110 noise=1
sig teeth rgb_b dc=100 noise=1
sig teeth pressure dc=1013 noise=0.05
sig teeth humidity dc=43 noise=0.2
sig teeth mag_x dc=15 noise=0.3
sig teeth mag_y dc=-5 noise=0.3
sig teeth mag_z dc=40 noise=0.3
sig teeth gas dc=100 noise=0.5
sig teeth temperature dc=22 noise=0.05

sig idle pir 
sig idle accel_x noise=0.01
sig idle accel_y noise=0.01
sig idle accel_z dc=1 noise=0.01
sig idle audio dc=0.2 noise=0.05
sig idle rgb_r dc=120 noise=1
sig idle rgb_g dc=110 noise=1
sig idle rgb_b dc=100 noise=1
sig idle pressure dc=1013 noise=0.05
sig idle humidity dc=40 noise=0.2
sig idle mag_x dc=20 noise=0.3
sig idle mag_y dc=-5 noise=0.3
sig idle mag_z dc=40 noise=0.3
sig idle gas dc=100 noise=0.5
sig idle temperature dc=22 noise=0.05
)SIG";

}  // namespace ambient
