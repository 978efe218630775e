// Generated by scripts/gen_tw1_table.py; do not edit.

pub const TW1_S_MIN: f64 = -10.0;
pub const TW1_S_MAX: f64 = 8.0;

pub const TW1_CDF: [f64; 600] = [
    3.16191256044704845e-22,
    4.75613497229614316e-22,
    7.13771650230356871e-22,
    1.06873034717900020e-21,
    1.59655405192312842e-21,
    2.37962576746247845e-21,
    3.53871971540749390e-21,
    5.25048048175087264e-21,
    7.77266991760722584e-21,
    1.14805477419401145e-20,
    1.69191723338060007e-20,
    2.48784118805721238e-20,
    3.65002753669976703e-20,
    5.34321302340846416e-20,
    7.80449148070404849e-20,
    1.13743193982827286e-19,
    1.65404692822705010e-19,
    2.40001936875195288e-19,
    3.47479421825204491e-19,
    5.01988502446711836e-19,
    7.23621894089663203e-19,
    1.04084434534359297e-18,
    1.49389112704063631e-18,
    2.13950887348909386e-18,
    3.05755396755997568e-18,
    4.36015548731019423e-18,
    6.20441072476727519e-18,
    8.80993554813989317e-18,
    1.24830716033408528e-17,
    1.76502004447682265e-17,
    2.49034881853888637e-17,
    3.50635587984835670e-17,
    4.92651698438133658e-17,
    6.90740731654745672e-17,
    9.66460588299729163e-17,
    1.34942931490564804e-16,
    1.88025153482711054e-16,
    2.61447499017042428e-16,
    3.62792808220276462e-16,
    5.02390470908812510e-16,
    6.94281467229554367e-16,
    9.57511757816826194e-16,
    1.31786198568989448e-15,
    1.81015567488673161e-15,
    2.48133276249681924e-15,
    3.39453342612640239e-15,
    4.63451266084264382e-15,
    6.31480388354456038e-15,
    8.58717631611603220e-15,
    1.16540940405059084e-14,
    1.57850945826721285e-14,
    2.13382744937427130e-14,
    2.87884148172689330e-14,
    3.87637208769188191e-14,
    5.20937139655032474e-14,
    6.98715291337389646e-14,
    9.35347831373893756e-14,
    1.24970329216638932e-13,
    1.66649672241146863e-13,
    2.21803655035677191e-13,
    2.94647338550734341e-13,
    3.90668901029123664e-13,
    5.17000017191924263e-13,
    6.82889722860259121e-13,
    9.00309437682071829e-13,
    1.18472387043047137e-12,
    1.55607128637960707e-12,
    2.04000746173327956e-12,
    2.66948105521086249e-12,
    3.48672465894692542e-12,
    4.54576613391224275e-12,
    5.91558981201054468e-12,
    7.68410774528800197e-12,
    9.96313858421234146e-12,
    1.28946372828946789e-11,
    1.66584743400387327e-11,
    2.14821306868015500e-11,
    2.76527559923435006e-11,
    3.55321368706998425e-11,
    4.55752405350580355e-11,
    5.83531427335016604e-11,
    7.45813208597316579e-11,
    9.51544992806933574e-11,
    1.21189480364589685e-10,
    1.54077688646549114e-10,
    1.95549505413387988e-10,
    2.47752886420405366e-10,
    3.13349247664934299e-10,
    3.95630186018419243e-10,
    4.98659287851959863e-10,
    6.27444086512339335e-10,
    7.88144177945282778e-10,
    9.88322614921839209e-10,
    1.23724899917440606e-09,
    1.54626420554983151e-09,
    1.92921843492418087e-09,
    2.40299633896223937e-09,
    2.98814533006712565e-09,
    3.70962592901312432e-09,
    4.59770616089064656e-09,
    5.68906205798653927e-09,
    7.02652798316014781e-09,
    8.66447229288205362e-09,
    1.06670997190552709e-08,
    1.31115886925070636e-08,
    1.60905526013028438e-08,
    1.97149352067379360e-08,
    2.41174104193148248e-08,
    2.94563669338437560e-08,
    3.59205695928209620e-08,
    4.37346023127417361e-08,
    5.31652118664592287e-08,
    6.45286879214617434e-08,
    7.81994327057501840e-08,
    9.46198938180419528e-08,
    1.14312055589638586e-07,
    1.37890709245941287e-07,
    1.66078748946523108e-07,
    1.99724770502194621e-07,
    2.39823282334773447e-07,
    2.87537873728182796e-07,
    3.44227724359026993e-07,
    4.11477881391924916e-07,
    4.91133776130060391e-07,
    5.85340501837898322e-07,
    6.96587427415977407e-07,
    8.27758779126687343e-07,
    9.82190883440294035e-07,
    1.16373682958325741e-06,
    1.37683937946261288e-06,
    1.62661302607942633e-06,
    1.91893617874924353e-06,
    2.26055453445995333e-06,
    2.65919677974899201e-06,
    3.12370385497230071e-06,
    3.66417310463819894e-06,
    4.29211873096442655e-06,
    5.02065006386450625e-06,
    5.86466925830573826e-06,
    6.84109012843648476e-06,
    7.96907992684272652e-06,
    9.27032597518662665e-06,
    1.07693291491814871e-05,
    1.24937263147624693e-05,
    1.44746439015878978e-05,
    1.67470848858263046e-05,
    1.93503515313931358e-05,
    2.23285063095612903e-05,
    2.57308734772737964e-05,
    2.96125838434723547e-05,
    3.40351652891082284e-05,
    3.90671816276172266e-05,
    4.47849223966152618e-05,
    5.12731461576678728e-05,
    5.86258798451745364e-05,
    6.69472766474523367e-05,
    7.63525348208529317e-05,
    8.69688797266831003e-05,
    9.89366112444489660e-05,
    1.12410218544474648e-04,
    1.27559564003225270e-04,
    1.44571137809090523e-04,
    1.63649384536889260e-04,
    1.85018102663176608e-04,
    2.08921917650007266e-04,
    2.35627828843008332e-04,
    2.65426830009513461e-04,
    2.98635602881328901e-04,
    3.35598282571135864e-04,
    3.76688293192957186e-04,
    4.22310251445038904e-04,
    4.72901935305104272e-04,
    5.28936314344430943e-04,
    5.90923637493769396e-04,
    6.59413573390006777e-04,
    7.34997397706786703e-04,
    8.18310221118955005e-04,
    9.10033250785001143e-04,
    1.01089607745054755e-03,
    1.12167897948881197e-03,
    1.24321523439954490e-03,
    1.37639342750784039e-03,
    1.52215974681993937e-03,
    1.68152025224042141e-03,
    1.85554310661461891e-03,
    2.04536075535804822e-03,
    2.25217204076639350e-03,
    2.47724423648188483e-03,
    2.72191498702440814e-03,
    2.98759413679188868e-03,
    3.27576543249720204e-03,
    3.58798808265130579e-03,
    3.92589815742753513e-03,
    4.29120981205454149e-03,
    4.68571631679923391e-03,
    5.11129087661643926e-03,
    5.56988722366411840e-03,
    6.06353996612283338e-03,
    6.59436467710902263e-03,
    7.16455770794954556e-03,
    7.77639571068477944e-03,
    8.43223485538700628e-03,
    9.13450972873591782e-03,
    9.88573190126164000e-03,
    1.06884881517717509e-02,
    1.15454383386907923e-02,
    1.24593129093868576e-02,
    1.34329100400059197e-02,
    1.44690923998983378e-02,
    1.55707835363797110e-02,
    1.67409638773246550e-02,
    1.79826663509308760e-02,
    1.92989716239015084e-02,
    2.06930029612775422e-02,
    2.21679207131763520e-02,
    2.37269164357698098e-02,
    2.53732066559310999e-02,
    2.71100262910931797e-02,
    2.89406217379806693e-02,
    3.08682436459694551e-02,
    3.28961393929086410e-02,
    3.50275452832658277e-02,
    3.72656784904244684e-02,
    3.96137287668712340e-02,
    4.20748499478190152e-02,
    4.46521512755240352e-02,
    4.73486885731640925e-02,
    5.01674552986107122e-02,
    5.31113735097688694e-02,
    5.61832847743492375e-02,
    5.93859410579536881e-02,
    6.27219956252301619e-02,
    6.61939939895192092e-02,
    6.98043649469261424e-02,
    7.35554117310531219e-02,
    7.74493033247457691e-02,
    8.14880659651266853e-02,
    8.56735748779096501e-02,
    9.00075462765097395e-02,
    9.44915296607907185e-02,
    9.91269004494240435e-02,
    1.03914852978770636e-01,
    1.08856393899958159e-01,
    1.13952336004393029e-01,
    1.19203292506371350e-01,
    1.24609671809680092e-01,
    1.30171672783183728e-01,
    1.35889280568347398e-01,
    1.41762262939473471e-01,
    1.47790167235134828e-01,
    1.53972317876917175e-01,
    1.60307814489082684e-01,
    1.66795530630249544e-01,
    1.73434113145555513e-01,
    1.80221982145148202e-01,
    1.87157331612168215e-01,
    1.94238130640712520e-01,
    2.01462125301599959e-01,
    2.08826841131110774e-01,
    2.16329586235253585e-01,
    2.23967454999559418e-01,
    2.31737332391899559e-01,
    2.39635898843414574e-01,
    2.47659635690313989e-01,
    2.55804831157081580e-01,
    2.64067586859524528e-01,
    2.72443824804112000e-01,
    2.80929294858067780e-01,
    2.89519582663865072e-01,
    2.98210117968041644e-01,
    3.06996183335568051e-01,
    3.15872923218055157e-01,
    3.24835353343392530e-01,
    3.33878370393627832e-01,
    3.42996761937087835e-01,
    3.52185216580208127e-01,
    3.61438334304130471e-01,
    3.70750636950892554e-01,
    3.80116578824009843e-01,
    3.89530557368311381e-01,
    3.98986923894185386e-01,
    4.08479994311789441e-01,
    4.18004059841340092e-01,
    4.27553397666326607e-01,
    4.37122281497277443e-01,
    4.46704992014718805e-01,
    4.56295827161016188e-01,
    4.65889112251987203e-01,
    4.75479209880445897e-01,
    4.85060529585223721e-01,
    4.94627537260678984e-01,
    5.04174764283199406e-01,
    5.13696816332822270e-01,
    5.23188381889714282e-01,
    5.32644240386940693e-01,
    5.42059270002655635e-01,
    5.51428455076580448e-01,
    5.60746893137378910e-01,
    5.70009801529296922e-01,
    5.79212523628154341e-01,
    5.88350534638524603e-01,
    5.97419446965642309e-01,
    6.06415015157257375e-01,
    6.15333140412291479e-01,
    6.24169874654769585e-01,
    6.32921424173030323e-01,
    6.41584152825752208e-01,
    6.50154584817735137e-01,
    6.58629407049788229e-01,
    6.67005471048361609e-01,
    6.75279794481816298e-01,
    6.83449562271391420e-01,
    6.91512127306004865e-01,
    6.99465010771062046e-01,
    7.07305902102351447e-01,
    7.15032658577010261e-01,
    7.22643304554230648e-01,
    7.30136030379199497e-01,
    7.37509190964238726e-01,
    7.44761304061765994e-01,
    7.51891048244067273e-01,
    7.58897260605328250e-01,
    7.65778934201597372e-01,
    7.72535215244666840e-01,
    7.79165400065973346e-01,
    7.85668931866701947e-01,
    7.92045397270381923e-01,
    7.98294522694147801e-01,
    8.04416170554785426e-01,
    8.10410335325567388e-01,
    8.16277139459623546e-01,
    8.22016829195399090e-01,
    8.27629770259426412e-01,
    8.33116443481332847e-01,
    8.38477440335608892e-01,
    8.43713458424259599e-01,
    8.48825296914066829e-01,
    8.53813851941620849e-01,
    8.58680111998934459e-01,
    8.63425153311808358e-01,
    8.68050135222651287e-01,
    8.72556295588929665e-01,
    8.76944946207806053e-01,
    8.81217468277012861e-01,
    8.85375307901411390e-01,
    8.89419971654104469e-01,
    8.93353022200425007e-01,
    8.97176073992499656e-01,
    9.00890789041562501e-01,
    9.04498872774584406e-01,
    9.08002069981260762e-01,
    9.11402160856808252e-01,
    9.14700957145535454e-01,
    9.17900298389559444e-01,
    9.21002048286576502e-01,
    9.24008091160082534e-01,
    9.26920328544922789e-01,
    9.29740675890639579e-01,
    9.32471059384591183e-01,
    9.35113412896387053e-01,
    9.37669675044808804e-01,
    9.40141786387932998e-01,
    9.42531686736856944e-01,
    9.44841312593018623e-01,
    9.47072594708827542e-01,
    9.49227455770917716e-01,
    9.51307808205173133e-01,
    9.53315552102233621e-01,
    9.55252573262084126e-01,
    9.57120741356001226e-01,
    9.58921908203932527e-01,
    9.60657906165213848e-01,
    9.62330546640308260e-01,
    9.63941618681093404e-01,
    9.65492887707121716e-01,
    9.66986094325065659e-01,
    9.68422953248537444e-01,
    9.69805152315279195e-01,
    9.71134351598732626e-01,
    9.72412182610841724e-01,
    9.73640247592935881e-01,
    9.74820118891475240e-01,
    9.75953338415431082e-01,
    9.77041417172013094e-01,
    9.78085834877485794e-01,
    9.79088039639803731e-01,
    9.80049447709789745e-01,
    9.80971443297619872e-01,
    9.81855378451397476e-01,
    9.82702572994643031e-01,
    9.83514314519538302e-01,
    9.84291858432844613e-01,
    9.85036428051470292e-01,
    9.85749214744678359e-01,
    9.86431378120051550e-01,
    9.87084046250332969e-01,
    9.87708315938405690e-01,
    9.88305253017674579e-01,
    9.88875892685251445e-01,
    9.89421239865401980e-01,
    9.89942269600767810e-01,
    9.90439927469030201e-01,
    9.90915130022676727e-01,
    9.91368765249714179e-01,
    9.91801693053167233e-01,
    9.92214745747340920e-01,
    9.92608728568930676e-01,
    9.92984420201063367e-01,
    9.93342573308557242e-01,
    9.93683915082648084e-01,
    9.94009147793630032e-01,
    9.94318949349845216e-01,
    9.94613973861613654e-01,
    9.94894852208706215e-01,
    9.95162192610101970e-01,
    9.95416581194801919e-01,
    9.95658582572585216e-01,
    9.95888740403626960e-01,
    9.96107577965973934e-01,
    9.96315598720004081e-01,
    9.96513286868954573e-01,
    9.96701107914750195e-01,
    9.96879509208409842e-01,
    9.97048920494332913e-01,
    9.97209754447868968e-01,
    9.97362407205595991e-01,
    9.97507258887810444e-01,
    9.97644674112756591e-01,
    9.97775002502204522e-01,
    9.97898579177972866e-01,
    9.98015725249135288e-01,
    9.98126748289553833e-01,
    9.98231942805580141e-01,
    9.98331590693647186e-01,
    9.98425961687630870e-01,
    9.98515313795820481e-01,
    9.98599893727410648e-01,
    9.98679937308419530e-01,
    9.98755669887002040e-01,
    9.98827306728121700e-01,
    9.98895053397598653e-01,
    9.98959106135534847e-01,
    9.99019652219175436e-01,
    9.99076870315276921e-01,
    9.99130930822031749e-01,
    9.99181996200673828e-01,
    9.99230221296877441e-01,
    9.99275753652041576e-01,
    9.99318733804633652e-01,
    9.99359295581727647e-01,
    9.99397566380868185e-01,
    9.99433667442479634e-01,
    9.99467714112941663e-01,
    9.99499816098543548e-01,
    9.99530077710499731e-01,
    9.99558598101190188e-01,
    9.99585471491879485e-01,
    9.99610787392048894e-01,
    9.99634630810584124e-01,
    9.99657082459017188e-01,
    9.99678218947013142e-01,
    9.99698112970323849e-01,
    9.99716833491404500e-01,
    9.99734445912910163e-01,
    9.99751012244264214e-01,
    9.99766591261520454e-01,
    9.99781238660704896e-01,
    9.99795007204849595e-01,
    9.99807946864925912e-01,
    9.99820104954842082e-01,
    9.99831526260747450e-01,
    9.99842253164781480e-01,
    9.99852325763509686e-01,
    9.99861781981188913e-01,
    9.99870657678057606e-01,
    9.99878986753842125e-01,
    9.99886801246631096e-01,
    9.99894131427309873e-01,
    9.99901005889694883e-01,
    9.99907451636564137e-01,
    9.99913494161702388e-01,
    9.99919157528156299e-01,
    9.99924464442821015e-01,
    9.99929436327499088e-01,
    9.99934093386614542e-01,
    9.99938454671662535e-01,
    9.99942538142575610e-01,
    9.99946360726111760e-01,
    9.99949938371387681e-01,
    9.99953286102696959e-01,
    9.99956418069706698e-01,
    9.99959347595168024e-01,
    9.99962087220227280e-01,
    9.99964648747467932e-01,
    9.99967043281762558e-01,
    9.99969281269043053e-01,
    9.99971372533091651e-01,
    9.99973326310420907e-01,
    9.99975151283357899e-01,
    9.99976855611397375e-01,
    9.99978446960902656e-01,
    9.99979932533255456e-01,
    9.99981319091498455e-01,
    9.99982612985563679e-01,
    9.99983820176153948e-01,
    9.99984946257326146e-01,
    9.99985996477857464e-01,
    9.99986975761452346e-01,
    9.99987888725836882e-01,
    9.99988739700801932e-01,
    9.99989532745266363e-01,
    9.99990271663363850e-01,
    9.99990960019662478e-01,
    9.99991601153507936e-01,
    9.99992198192572013e-01,
    9.99992754065632150e-01,
    9.99993271514619142e-01,
    9.99993753105983929e-01,
    9.99994201241407588e-01,
    9.99994618167899918e-01,
    9.99995005987304508e-01,
    9.99995366665260454e-01,
    9.99995702039638945e-01,
    9.99996013828482577e-01,
    9.99996303637472828e-01,
    9.99996572966973085e-01,
    9.99996823218636255e-01,
    9.99997055701623450e-01,
    9.99997271638457863e-01,
    9.99997472170516821e-01,
    9.99997658363199204e-01,
    9.99997831210777233e-01,
    9.99997991640953487e-01,
    9.99998140519143486e-01,
    9.99998278652487360e-01,
    9.99998406793626726e-01,
    9.99998525644239300e-01,
    9.99998635858355356e-01,
    9.99998738045472679e-01,
    9.99998832773475677e-01,
    9.99998920571365302e-01,
    9.99999001931833109e-01,
    9.99999077313649343e-01,
    9.99999147143921685e-01,
    9.99999211820201239e-01,
    9.99999271712450954e-01,
    9.99999327164895813e-01,
    9.99999378497751668e-01,
    9.99999426008836623e-01,
    9.99999469975086486e-01,
    9.99999510653971080e-01,
    9.99999548284812523e-01,
    9.99999583090023014e-01,
    9.99999615276258913e-01,
    9.99999645035502316e-01,
    9.99999672546065921e-01,
    9.99999697973535717e-01,
    9.99999721471651504e-01,
    9.99999743183124901e-01,
    9.99999763240406514e-01,
    9.99999781766401141e-01,
    9.99999798875132906e-01,
    9.99999814672367759e-01,
    9.99999829256192463e-01,
    9.99999842717557152e-01,
    9.99999855140776495e-01,
    9.99999866603999754e-01,
    9.99999877179649888e-01,
    9.99999886934830440e-01,
    9.99999895931700133e-01,
    9.99999904227833136e-01,
    9.99999911876545022e-01,
    9.99999918927197529e-01,
    9.99999925425484326e-01,
    9.99999931413695031e-01,
    9.99999936930964117e-01,
    9.99999942013497067e-01,
    9.99999946694785313e-01,
    9.99999951005802856e-01,
    9.99999954975190897e-01,
    9.99999958629428698e-01,
    9.99999961992993347e-01,
    9.99999965088505305e-01,
    9.99999967936866407e-01,
    9.99999970557387985e-01,
    9.99999972967906658e-01,
    9.99999975184896805e-01,
    9.99999977223568592e-01,
    9.99999979097964120e-01,
    9.99999980821047907e-01,
    9.99999982404780163e-01,
    9.99999983860200392e-01,
    9.99999985197491781e-01,
    9.99999986426047927e-01,
    9.99999987554530678e-01,
    9.99999988590928646e-01,
    9.99999989542606271e-01,
    9.99999990416350792e-01,
    9.99999991218419648e-01,
    9.99999991954575451e-01,
];
