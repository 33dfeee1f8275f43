"""Symmetric triangle rules on the reference triangle (0,0), (1,0), (0,1).

Each entry maps the exactness degree to ``(x, y, weight)`` triples; weights
sum to 1/2.  All weights are positive and all nodes are interior.  Values
were refined to full double precision by solving the moment equations
within each symmetry orbit; ``tests/test_quadrature.py`` checks exactness.
"""

TRIANGLE_TABLES = {
    2: (
        [
            (0.16666666666666667, 0.16666666666666667, 0.16666666666666667),
            (0.16666666666666667, 0.66666666666666667, 0.16666666666666667),
            (0.66666666666666667, 0.16666666666666667, 0.16666666666666667),
        ]
    ),
    4: (
        [
            (0.44594849091596489, 0.44594849091596489, 0.11169079483900573),
            (0.44594849091596489, 0.10810301816807023, 0.11169079483900573),
            (0.10810301816807023, 0.44594849091596489, 0.11169079483900573),
            (0.091576213509770743, 0.091576213509770743, 0.054975871827660934),
            (0.091576213509770743, 0.81684757298045851, 0.054975871827660934),
            (0.81684757298045851, 0.091576213509770743, 0.054975871827660934),
        ]
    ),
    5: (
        [
            (0.33333333333333333, 0.33333333333333333, 0.1125),
            (0.47014206410511509, 0.47014206410511509, 0.06619707639425309),
            (0.47014206410511509, 0.05971587178976982, 0.06619707639425309),
            (0.05971587178976982, 0.47014206410511509, 0.06619707639425309),
            (0.10128650732345634, 0.10128650732345634, 0.062969590272413576),
            (0.10128650732345634, 0.79742698535308732, 0.062969590272413576),
            (0.79742698535308732, 0.10128650732345634, 0.062969590272413576),
        ]
    ),
    6: (
        [
            (0.24928674517091042, 0.24928674517091042, 0.058393137863189683),
            (0.24928674517091042, 0.50142650965817916, 0.058393137863189683),
            (0.50142650965817916, 0.24928674517091042, 0.058393137863189683),
            (0.063089014491502228, 0.063089014491502228, 0.025422453185103408),
            (0.063089014491502228, 0.87382197101699554, 0.025422453185103408),
            (0.87382197101699554, 0.063089014491502228, 0.025422453185103408),
            (0.053145049844816947, 0.31035245103378441, 0.041425537809186788),
            (0.31035245103378441, 0.053145049844816947, 0.041425537809186788),
            (0.053145049844816947, 0.63650249912139865, 0.041425537809186788),
            (0.63650249912139865, 0.053145049844816947, 0.041425537809186788),
            (0.31035245103378441, 0.63650249912139865, 0.041425537809186788),
            (0.63650249912139865, 0.31035245103378441, 0.041425537809186788),
        ]
    ),
    8: (
        [
            (0.33333333333333333, 0.33333333333333333, 0.072157803838893584),
            (0.45929258829272316, 0.45929258829272316, 0.047545817133642312),
            (0.45929258829272316, 0.081414823414553688, 0.047545817133642312),
            (0.081414823414553688, 0.45929258829272316, 0.047545817133642312),
            (0.17056930775176021, 0.17056930775176021, 0.051608685267359125),
            (0.17056930775176021, 0.65886138449647959, 0.051608685267359125),
            (0.65886138449647959, 0.17056930775176021, 0.051608685267359125),
            (0.050547228317030975, 0.050547228317030975, 0.01622924881159904),
            (0.050547228317030975, 0.89890554336593805, 0.01622924881159904),
            (0.89890554336593805, 0.050547228317030975, 0.01622924881159904),
            (0.0083947774099576053, 0.26311282963463811, 0.013615157087217497),
            (0.26311282963463811, 0.0083947774099576053, 0.013615157087217497),
            (0.0083947774099576053, 0.72849239295540428, 0.013615157087217497),
            (0.72849239295540428, 0.0083947774099576053, 0.013615157087217497),
            (0.26311282963463811, 0.72849239295540428, 0.013615157087217497),
            (0.72849239295540428, 0.26311282963463811, 0.013615157087217497),
        ]
    ),
    9: (
        [
            (0.33333333333333333, 0.33333333333333333, 0.048567898141399417),
            (0.48968251919873763, 0.48968251919873763, 0.015667350113569535),
            (0.48968251919873763, 0.020634961602524744, 0.015667350113569535),
            (0.020634961602524744, 0.48968251919873763, 0.015667350113569535),
            (0.43708959149293664, 0.43708959149293664, 0.03891377050238714),
            (0.43708959149293664, 0.12582081701412673, 0.03891377050238714),
            (0.12582081701412673, 0.43708959149293664, 0.03891377050238714),
            (0.18820353561903273, 0.18820353561903273, 0.039823869463605127),
            (0.18820353561903273, 0.62359292876193454, 0.039823869463605127),
            (0.62359292876193454, 0.18820353561903273, 0.039823869463605127),
            (0.04472951339445271, 0.04472951339445271, 0.012788837829349016),
            (0.04472951339445271, 0.91054097321109458, 0.012788837829349016),
            (0.91054097321109458, 0.04472951339445271, 0.012788837829349016),
            (0.036838412054736284, 0.2219629891607657, 0.021641769688644689),
            (0.2219629891607657, 0.036838412054736284, 0.021641769688644689),
            (0.036838412054736284, 0.74119859878449802, 0.021641769688644689),
            (0.74119859878449802, 0.036838412054736284, 0.021641769688644689),
            (0.2219629891607657, 0.74119859878449802, 0.021641769688644689),
            (0.74119859878449802, 0.2219629891607657, 0.021641769688644689),
        ]
    ),
    10: (
        [
            (0.33333333333333333, 0.33333333333333333, 0.04540899519137679),
            (0.48557763338365738, 0.48557763338365738, 0.018362978878233352),
            (0.48557763338365738, 0.028844733232685245, 0.018362978878233352),
            (0.028844733232685245, 0.48557763338365738, 0.018362978878233352),
            (0.10948157548503705, 0.10948157548503705, 0.022660529717763967),
            (0.10948157548503705, 0.78103684902992589, 0.022660529717763967),
            (0.78103684902992589, 0.10948157548503705, 0.022660529717763967),
            (0.14170721941487995, 0.30793983876412095, 0.036378958422710054),
            (0.30793983876412095, 0.14170721941487995, 0.036378958422710054),
            (0.14170721941487995, 0.5503529418209991, 0.036378958422710054),
            (0.5503529418209991, 0.14170721941487995, 0.036378958422710054),
            (0.30793983876412095, 0.5503529418209991, 0.036378958422710054),
            (0.5503529418209991, 0.30793983876412095, 0.036378958422710054),
            (0.025003534762686386, 0.24667256063990269, 0.014163621265528742),
            (0.24667256063990269, 0.025003534762686386, 0.014163621265528742),
            (0.025003534762686386, 0.72832390459741092, 0.014163621265528742),
            (0.72832390459741092, 0.025003534762686386, 0.014163621265528742),
            (0.24667256063990269, 0.72832390459741092, 0.014163621265528742),
            (0.72832390459741092, 0.24667256063990269, 0.014163621265528742),
            (0.0095408154002994576, 0.066803251012200266, 0.0047108334818664117),
            (0.066803251012200266, 0.0095408154002994576, 0.0047108334818664117),
            (0.0095408154002994576, 0.92365593358750028, 0.0047108334818664117),
            (0.92365593358750028, 0.0095408154002994576, 0.0047108334818664117),
            (0.066803251012200266, 0.92365593358750028, 0.0047108334818664117),
            (0.92365593358750028, 0.066803251012200266, 0.0047108334818664117),
        ]
    ),
    12: (
        [
            (0.48821738977380488, 0.48821738977380488, 0.012865533220227668),
            (0.48821738977380488, 0.023565220452390235, 0.012865533220227668),
            (0.023565220452390235, 0.48821738977380488, 0.012865533220227668),
            (0.43972439229446027, 0.43972439229446027, 0.021846272269019201),
            (0.43972439229446027, 0.12055121541107945, 0.021846272269019201),
            (0.12055121541107945, 0.43972439229446027, 0.021846272269019201),
            (0.27121038501211592, 0.27121038501211592, 0.03142911210894255),
            (0.27121038501211592, 0.45757922997576816, 0.03142911210894255),
            (0.45757922997576816, 0.27121038501211592, 0.03142911210894255),
            (0.12757614554158592, 0.12757614554158592, 0.017398056465354471),
            (0.12757614554158592, 0.74484770891682815, 0.017398056465354471),
            (0.74484770891682815, 0.12757614554158592, 0.017398056465354471),
            (0.02131735045321037, 0.02131735045321037, 0.0030831305257795086),
            (0.02131735045321037, 0.95736529909357926, 0.0030831305257795086),
            (0.95736529909357926, 0.02131735045321037, 0.0030831305257795086),
            (0.115343494534698, 0.27571326968551419, 0.020185778883190465),
            (0.27571326968551419, 0.115343494534698, 0.020185778883190465),
            (0.115343494534698, 0.60894323577978781, 0.020185778883190465),
            (0.60894323577978781, 0.115343494534698, 0.020185778883190465),
            (0.27571326968551419, 0.60894323577978781, 0.020185778883190465),
            (0.60894323577978781, 0.27571326968551419, 0.020185778883190465),
            (0.02283833222225703, 0.28132558098993955, 0.011178386601151723),
            (0.28132558098993955, 0.02283833222225703, 0.011178386601151723),
            (0.02283833222225703, 0.69583608678780342, 0.011178386601151723),
            (0.69583608678780342, 0.02283833222225703, 0.011178386601151723),
            (0.28132558098993955, 0.69583608678780342, 0.011178386601151723),
            (0.69583608678780342, 0.28132558098993955, 0.011178386601151723),
            (0.025734050548330228, 0.11625191590759714, 0.0086581155543294462),
            (0.11625191590759714, 0.025734050548330228, 0.0086581155543294462),
            (0.025734050548330228, 0.85801403354407263, 0.0086581155543294462),
            (0.85801403354407263, 0.025734050548330228, 0.0086581155543294462),
            (0.11625191590759714, 0.85801403354407263, 0.0086581155543294462),
            (0.85801403354407263, 0.11625191590759714, 0.0086581155543294462),
        ]
    ),
}
