//! J_l(x) against 20-digit reference values.

#![allow(clippy::excessive_precision)]

use vortex_align::bessel::bessel_j;

#[rustfmt::skip]
const REFERENCE: &[(i32, f64, f64)] = &[
    (0, 0.0, 1.0),
    (0, 0.001, 0.999999750000015625),
    (0, 0.03, 0.99977501265593359822),
    (0, 0.5, 0.93846980724081290423),
    (0, 1.0, 0.76519768655796655145),
    (0, 2.01, 0.21812682132584890632),
    (0, 3.49, -0.37873299699162636162),
    (0, 5.0, -0.17759677131433830435),
    (0, 7.5, 0.26633965788037839687),
    (0, 10.0, -0.2459357644513483352),
    (0, 13.1, 0.21288819752206036269),
    (0, 25.0, 0.096266783275958116174),
    (0, 47.3, -0.094959345344983000891),
    (0, 99.9, 0.012180433516928978157),
    (0, 250.0, -0.026053373425204233664),
    (0, 517.0, 0.019161085304890483128),
    (0, 1000.0, 0.024786686152420174561),
    (0, -3.7, -0.39923020337119111533),
    (0, -42.0, -0.11473949671358282079),
    (1, 0.0, 0.0),
    (1, 0.001, 0.00049999993750000261457),
    (1, 0.03, 0.014998312563280062935),
    (1, 0.5, 0.24226845767487388638),
    (1, 1.0, 0.44005058574493351596),
    (1, 2.01, 0.57606009095475476734),
    (1, 3.49, 0.14157093722147297357),
    (1, 5.0, -0.32757913759146522204),
    (1, 7.5, 0.13524842757970550518),
    (1, 10.0, 0.04347274616886143667),
    (1, 13.1, -0.048852473334223783711),
    (1, 25.0, -0.12535024958028990465),
    (1, 47.3, 0.065642086404151882951),
    (1, 99.9, -0.078833166324155768971),
    (1, 250.0, -0.043269038410330749511),
    (1, 517.0, 0.02941625047634743275),
    (1, 1000.0, 0.0047283119070895239176),
    (1, -3.7, -0.053833987745461790513),
    (1, -42.0, 0.045993888221887140055),
    (2, 0.0, 0.0),
    (2, 0.001, 1.2499998958333366406e-7),
    (2, 0.03, 0.00011249156273730111964),
    (2, 0.5, 0.030604023458682641307),
    (2, 1.0, 0.11490348493190048047),
    (2, 2.01, 0.35506729902714097272),
    (2, 3.49, 0.45986247390937591172),
    (2, 5.0, 0.046565116277752215532),
    (2, 7.5, -0.23027341052579026215),
    (2, 10.0, 0.25463031368512062253),
    (2, 13.1, -0.22034659039751437568),
    (2, 25.0, -0.10629480324238130855),
    (2, 47.3, 0.097734909252135300548),
    (2, 99.9, -0.013758675084980144613),
    (2, 250.0, 0.025707221117921587668),
    (2, 517.0, -0.019047289364943297702),
    (2, 1000.0, -0.024777229528605995513),
    (2, -3.7, 0.42832965620657586556),
    (2, -42.0, 0.11254931156015962364),
    (3, 0.0, 0.0),
    (3, 0.001, 2.0833332031250033853e-11),
    (3, 0.03, 5.624683600869051012e-7),
    (3, 0.5, 0.0025637299945872440754),
    (3, 1.0, 0.019563353982668405919),
    (3, 2.01, 0.13054149914900843738),
    (3, 3.49, 0.38549207012451657787),
    (3, 5.0, 0.36483123061366699446),
    (3, 7.5, -0.25806091319346031166),
    (3, 10.0, 0.058379379305186812343),
    (3, 13.1, -0.018428928313872210687),
    (3, 25.0, 0.10834308106150889528),
    (3, 47.3, -0.057376977799320144565),
    (3, 99.9, 0.078282268422855262712),
    (3, 250.0, 0.043680353948217494914),
    (3, 517.0, -0.029563618285747380895),
    (3, 1000.0, -0.0048274208252039478996),
    (3, -3.7, -0.40922510004543101489),
    (3, -42.0, -0.05671287027523567564),
    (5, 0.0, 0.0),
    (5, 0.001, 2.6041665581597244309e-19),
    (5, 0.03, 6.3278876991262884096e-12),
    (5, 0.5, 8.053627241357474086e-6),
    (5, 1.0, 0.00024975773021123443138),
    (5, 2.01, 0.0072050395000296746994),
    (5, 3.49, 0.07955001445828806301),
    (5, 5.0, 0.26114054612017009005),
    (5, 7.5, 0.28347390516255045867),
    (5, 10.0, -0.23406152818679364044),
    (5, 13.1, 0.14783708701437708241),
    (5, 25.0, -0.066007995398422993392),
    (5, 47.3, 0.03961576463724666852),
    (5, 99.9, -0.07680396509327811969),
    (5, 250.0, -0.044469438512158754683),
    (5, 517.0, 0.029853044843277580809),
    (5, 1000.0, 0.0050254069452331860742),
    (5, -3.7, -0.09948541700833390963),
    (5, -42.0, 0.07660762702750456516),
    (8, 0.0, 0.0),
    (8, 0.001, 9.6881197705680991131e-32),
    (8, 0.03, 6.3562166504344799477e-20),
    (8, 0.5, 3.758223154797609955e-10),
    (8, 1.0, 9.4223441726045005454e-8),
    (8, 2.01, 0.000023056426608885983489),
    (8, 3.49, 0.0015111650830256672981),
    (8, 5.0, 0.01840521665480200092),
    (8, 7.5, 0.17440789049583129331),
    (8, 10.0, 0.31785412684385722501),
    (8, 13.1, -0.15591014503306590774),
    (8, 25.0, 0.15300616665739891923),
    (8, 47.3, -0.11659974918166423798),
    (8, 99.9, 0.036471542871024879226),
    (8, 250.0, -0.02032832477665488883),
    (8, 517.0, 0.017306970008318634267),
    (8, 1000.0, 0.02462350597113222935),
    (8, -3.7, 0.0023089067943833500518),
    (8, -42.0, -0.052461442100134130507),
    (12, 0.0, 0.0),
    (12, 0.001, 5.0968644009746122701e-49),
    (12, 0.03, 2.7086358855372439098e-31),
    (12, 0.5, 1.2383825594799326896e-16),
    (12, 1.0, 4.9997181794484052891e-13),
    (12, 2.01, 2.0503090141543530562e-9),
    (12, 3.49, 1.3140534602639246194e-6),
    (12, 5.0, 0.000076278131660845513551),
    (12, 7.5, 0.0052250446858034624719),
    (12, 10.0, 0.06337025497015601509),
    (12, 13.1, 0.2664443238960462829),
    (12, 25.0, -0.07286782727986288457),
    (12, 47.3, -0.071628547770449355299),
    (12, 99.9, 0.06148066507730036414),
    (12, 250.0, -0.012709978683778975245),
    (12, 517.0, 0.014896540220776478284),
    (12, 1000.0, 0.024384086530438304024),
    (12, -3.7, 2.572091317506959174e-6),
    (12, -42.0, 0.063116494318794273166),
    (16, 0.0, 0.0),
    (16, 0.001, 7.292903537141351347e-67),
    (16, 0.03, 3.1393143345605796696e-43),
    (16, 0.5, 1.1087246698764159834e-23),
    (16, 1.0, 7.1863965868074928286e-19),
    (16, 2.01, 4.8774383799290045901e-14),
    (16, 3.49, 2.9506986936014957096e-10),
    (16, 5.0, 7.6750156939122404884e-8),
    (16, 7.5, 0.000031322350398192389414),
    (16, 10.0, 0.0015667561917001806353),
    (16, 13.1, 0.035336690684640770465),
    (16, 25.0, -0.057711236766231264174),
    (16, 47.3, 0.062441857424986545231),
    (16, 99.9, 0.079631596243288024862),
    (16, 250.0, -0.001532553850689766937),
    (16, 517.0, 0.011374686342728209155),
    (16, 1000.0, 0.023983434398793024038),
    (16, -3.7, 7.3484943186078002337e-10),
    (16, -42.0, 0.12175227073574984843),
    (-1, 0.0, 0.0),
    (-1, 0.001, -0.00049999993750000261457),
    (-1, 0.03, -0.014998312563280062935),
    (-1, 0.5, -0.24226845767487388638),
    (-1, 1.0, -0.44005058574493351596),
    (-1, 2.01, -0.57606009095475476734),
    (-1, 3.49, -0.14157093722147297357),
    (-1, 5.0, 0.32757913759146522204),
    (-1, 7.5, -0.13524842757970550518),
    (-1, 10.0, -0.04347274616886143667),
    (-1, 13.1, 0.048852473334223783711),
    (-1, 25.0, 0.12535024958028990465),
    (-1, 47.3, -0.065642086404151882951),
    (-1, 99.9, 0.078833166324155768971),
    (-1, 250.0, 0.043269038410330749511),
    (-1, 517.0, -0.02941625047634743275),
    (-1, 1000.0, -0.0047283119070895239176),
    (-1, -3.7, 0.053833987745461790513),
    (-1, -42.0, -0.045993888221887140055),
    (-3, 0.0, 0.0),
    (-3, 0.001, -2.0833332031250033853e-11),
    (-3, 0.03, -5.624683600869051012e-7),
    (-3, 0.5, -0.0025637299945872440754),
    (-3, 1.0, -0.019563353982668405919),
    (-3, 2.01, -0.13054149914900843738),
    (-3, 3.49, -0.38549207012451657787),
    (-3, 5.0, -0.36483123061366699446),
    (-3, 7.5, 0.25806091319346031166),
    (-3, 10.0, -0.058379379305186812343),
    (-3, 13.1, 0.018428928313872210687),
    (-3, 25.0, -0.10834308106150889528),
    (-3, 47.3, 0.057376977799320144565),
    (-3, 99.9, -0.078282268422855262712),
    (-3, 250.0, -0.043680353948217494914),
    (-3, 517.0, 0.029563618285747380895),
    (-3, 1000.0, 0.0048274208252039478996),
    (-3, -3.7, 0.40922510004543101489),
    (-3, -42.0, 0.05671287027523567564),
    (-16, 0.0, 0.0),
    (-16, 0.001, 7.292903537141351347e-67),
    (-16, 0.03, 3.1393143345605796696e-43),
    (-16, 0.5, 1.1087246698764159834e-23),
    (-16, 1.0, 7.1863965868074928286e-19),
    (-16, 2.01, 4.8774383799290045901e-14),
    (-16, 3.49, 2.9506986936014957096e-10),
    (-16, 5.0, 7.6750156939122404884e-8),
    (-16, 7.5, 0.000031322350398192389414),
    (-16, 10.0, 0.0015667561917001806353),
    (-16, 13.1, 0.035336690684640770465),
    (-16, 25.0, -0.057711236766231264174),
    (-16, 47.3, 0.062441857424986545231),
    (-16, 99.9, 0.079631596243288024862),
    (-16, 250.0, -0.001532553850689766937),
    (-16, 517.0, 0.011374686342728209155),
    (-16, 1000.0, 0.023983434398793024038),
    (-16, -3.7, 7.3484943186078002337e-10),
    (-16, -42.0, 0.12175227073574984843),
];

#[test]
fn matches_reference_table() {
    for &(order, x, expected) in REFERENCE {
        let got = bessel_j(order, x);
        let tolerance = 1e-10 * expected.abs() + 1e-14;
        assert!(
            (got - expected).abs() <= tolerance,
            "J_{order}({x}) = {got:e}, expected {expected:e}"
        );
    }
}
